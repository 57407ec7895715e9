import math

# --- Integrator defaults ---
DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
# e^-20 ~ 2e-9 separation; e^{-mu} stays ~5e8, well inside double range
DEFAULT_MU_MIN = -20.0
DEFAULT_EVENT_TOL = 1e-10
# Dormand-Prince 5(4) embedded pair
DEFAULT_METHOD = "RK45"
# Accepted steps used for the linear-in-e^mu blow-up extrapolation
CAPTURE_EXTRAPOLATION_POINTS = 3

# --- Quadrature (t_of_phi) ---
QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-12
QUAD_LIMIT = 200

# --- Periodic orbit search ---
ORBIT_TOL = 1e-10
ORBIT_MAX_ITERS = 200
ORBIT_REL_TOL = 1e-12
ORBIT_ABS_TOL = 1e-13

# --- Canonical scenario (evader at (a, 0), pursuer at the origin) ---
CANONICAL_PHI0 = math.pi / 2
CANONICAL_RHO0 = 1.0
CANONICAL_ZETA0 = math.pi / 2

# Initial (mu, zeta) of the four-pursuer global attraction experiment
ATTRACTION_SEEDS: tuple[tuple[float, float], ...] = (
    (0.0, math.pi / 2),
    (1.0, 0.1),
    (-0.5, math.pi / 2),
    (-0.7, -math.pi / 2),
)
# Span of the seed convergence runs; the last revolution is plotted
ATTRACTION_SPAN = 20 * math.pi

# Loose bracket on the separation extremes of the elliptical limit orbit (a=1, b=0.5, n=0.5)
LIMIT_ORBIT_RHO_BRACKET = (0.35, 0.85)

# Tolerance below which a discriminant counts as zero (repeated eigenvalue)
DEGENERATE_DISCRIMINANT_TOL = 1e-12

# --- CLI exit codes ---
EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2
EXIT_VERIFICATION_FAILED = 3

# CSV export
CSV_COLUMNS = ["phi", "t", "mu", "zeta", "rho", "x", "y", "X", "Y"]
CSV_FLOAT_FORMAT = "%.16e"
