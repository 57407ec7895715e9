"""
Analytical objects of the pursuit systems: circular equilibrium and its spectrum,
capture-time bounds, the pi-period Poincare map of the complex system and its fixed
point, the contraction functionals L and D, the invariant annulus, and the
parametrization-invariance check of the Cartesian pursuit law.
"""

import cmath
import itertools
import math

import numpy as np

from src.core import dynamics, geometry
from src.core.exceptions import (
    IntegrationFailed,
    InvalidRegime,
    MaxItersExceeded,
    NoEquilibrium,
    UnexpectedCapture,
    UnsupportedDirection,
    ZeroModulus,
)
from src.core.integrate import Outcome, SeparationSensor, Trajectory, integrate
from src.shared import constants
from src.shared.config import settings
from src.shared.logger import get_logger
from src.shared.models import (
    AnnulusBounds,
    CaptureReport,
    ComplexState,
    ContractionReport,
    EllipseGeometry,
    EquilibriumClass,
    EquilibriumReport,
    IntegratorConfig,
    LogPolarState,
    PoincareResult,
    PolarState,
    SeedSweepResult,
)

logger = get_logger(__name__)

MODULUS_SENSOR = SeparationSensor(index=0, encoding="modulus")
LOG_SENSOR = SeparationSensor(index=0, encoding="log")


def _require_subcritical(n: float) -> None:
    if not 0 < n < 1:
        raise InvalidRegime(f"periodic-orbit theory needs 0 < n < 1, got n={n}")


def orbit_integrator_config() -> IntegratorConfig:
    """Tighter tolerances for Poincare iterations so map noise stays below the fixed-point tolerance."""
    return IntegratorConfig(rel_tol=constants.ORBIT_REL_TOL, abs_tol=constants.ORBIT_ABS_TOL)


# --- Circular equilibrium ---


def equilibrium_circular(a: float, n: float) -> tuple[float, float]:
    """(rho*, zeta*) = (a sqrt(1 - n²), arccos n) for 0 < n <= 1."""
    if n > 1:
        raise NoEquilibrium(f"circular system has no equilibrium for n={n} > 1")
    if n <= 0 or a <= 0:
        raise InvalidRegime(f"need a > 0 and n > 0, got a={a}, n={n}")
    if n == 1:
        # the equilibrium collapses onto the evader, approached head-on
        return 0.0, math.pi / 2
    return a * math.sqrt(1.0 - n * n), math.acos(n)


def limit_circle_radius(a: float, n: float) -> float:
    """Radius a*n of the circle the pursuer settles on when the circular system sits at equilibrium."""
    rho_star, _ = equilibrium_circular(a, n)
    return math.sqrt(a * a - rho_star * rho_star)


def polar_jacobian_t(s: PolarState, a: float) -> np.ndarray:
    """Jacobian of circular_rhs_t with respect to (rho, zeta)."""
    sin_z, cos_z = math.sin(s.zeta), math.cos(s.zeta)
    return np.array(
        [
            [0.0, -sin_z],
            [sin_z / s.rho**2, -cos_z / s.rho],
        ]
    )


def jacobian_circular(a: float, n: float) -> tuple[np.ndarray, tuple[complex, complex]]:
    """
    Jacobian at the circular equilibrium and its eigenvalues in closed form,
    lambda± = (-n ± sqrt(5n² - 4)) / (2a sqrt(1 - n²)).
    """
    if not 0 < n < 1:
        raise InvalidRegime(f"Jacobian analysis needs 0 < n < 1, got n={n}")
    rho_star, zeta_star = equilibrium_circular(a, n)
    jac = polar_jacobian_t(PolarState(rho=rho_star, zeta=zeta_star), a)

    discriminant = 5 * n * n - 4
    if abs(discriminant) <= constants.DEGENERATE_DISCRIMINANT_TOL:
        discriminant = 0.0
    root = cmath.sqrt(discriminant)
    denom = 2 * a * math.sqrt(1 - n * n)
    return jac, ((-n + root) / denom, (-n - root) / denom)


def classify_equilibrium(jac: np.ndarray) -> EquilibriumClass:
    """Trace/determinant classification of a stable 2x2 linearization."""
    p = float(np.trace(jac))
    q = float(np.linalg.det(jac))
    if q <= 0 or p >= 0:
        raise InvalidRegime(f"equilibrium is not asymptotically stable (trace={p}, det={q})")
    e = p * p - 4 * q
    if abs(e) <= constants.DEGENERATE_DISCRIMINANT_TOL * max(p * p, 4 * q):
        return EquilibriumClass.DEGENERATE
    return EquilibriumClass.STABLE_SPIRAL if e < 0 else EquilibriumClass.STABLE_NODE


def equilibrium_report(a: float, n: float) -> EquilibriumReport:
    rho_star, zeta_star = equilibrium_circular(a, n)
    jac, eigenvalues = jacobian_circular(a, n)
    return EquilibriumReport(
        rho_star=rho_star,
        zeta_star=zeta_star,
        jacobian=jac.tolist(),
        eigenvalues=eigenvalues,
        classification=classify_equilibrium(jac),
    )


# --- Capture-time bounds ---


def blowup_upper_bound(g: EllipseGeometry, n: float, mu0: float, phi0: float) -> float:
    """phi_B <= phi0 + b e^mu0 / (a² (n - 1)); uses f_min = b/a²."""
    if n <= 1:
        raise InvalidRegime(f"capture bound needs n > 1, got n={n}")
    f_min, _ = geometry.rate_bounds(g)
    return phi0 + f_min * math.exp(mu0) / (n - 1)


def guaranteed_upper_bound(g: EllipseGeometry, n: float, mu0: float, phi0: float) -> float:
    """
    phi_B <= phi0 + a e^mu0 / (b² (n - 1)). The coefficient of M² in dM/dphi is
    (n - cos zeta)/f, so the guaranteed rate uses f_max = a/b². Equal to
    blowup_upper_bound on a circle and looser on an ellipse.
    """
    if n <= 1:
        raise InvalidRegime(f"capture bound needs n > 1, got n={n}")
    _, f_max = geometry.rate_bounds(g)
    return phi0 + f_max * math.exp(mu0) / (n - 1)


def blowup_lower_bound(g: EllipseGeometry, n: float, mu0: float) -> float:
    """phi_B - phi0 >= e^mu0 b² / (a (n + 1)); uses f_max = a/b²."""
    if n <= 0:
        raise InvalidRegime(f"speed ratio must be positive, got n={n}")
    _, f_max = geometry.rate_bounds(g)
    return math.exp(mu0) / (f_max * (n + 1))


def capture_report(
    g: EllipseGeometry,
    n: float,
    mu0: float,
    phi0: float,
    outcome: Outcome | None,
    phi_b: float | None = None,
    phi_crossing: float | None = None,
) -> CaptureReport:
    """
    Bundles the measured blow-up with both bounds. For phi-parametrized runs phi_b and
    phi_crossing default to the outcome's own values.
    """
    captured = outcome is not None and outcome.captured
    if captured:
        phi_b = phi_b if phi_b is not None else outcome.s_blowup
        phi_crossing = phi_crossing if phi_crossing is not None else outcome.s_crossing
    else:
        phi_b = phi_crossing = None
    upper = blowup_upper_bound(g, n, mu0, phi0) - phi0 if n > 1 else None
    guaranteed = guaranteed_upper_bound(g, n, mu0, phi0) - phi0 if n > 1 else None
    return CaptureReport(
        phi0=phi0,
        mu0=mu0,
        captured=captured,
        phi_b_measured=phi_b,
        phi_b_crossing=phi_crossing,
        t_b=geometry.t_of_phi(g, phi0, phi_b) if phi_b is not None else None,
        upper_bound=upper,
        guaranteed_upper_bound=guaranteed,
        lower_bound=blowup_lower_bound(g, n, mu0),
    )


# --- Complex flow and Poincare map ---


def flow_complex(
    z0: ComplexState | complex,
    phi0: float,
    phi1: float,
    g: EllipseGeometry,
    n: float,
    cfg: IntegratorConfig | None = None,
) -> tuple[Trajectory, Outcome]:
    """Integrates dz/dphi from phi0 to phi1 with capture monitoring on |z|."""
    value = z0.z if isinstance(z0, ComplexState) else complex(z0)
    if value == 0:
        raise ZeroModulus("cannot start the complex flow at z = 0")
    return integrate(
        dynamics.complex_phi_field(g, n),
        np.array([value], dtype=complex),
        (phi0, phi1),
        cfg,
        sensor=MODULUS_SENSOR,
    )


def _advance(z0: complex, phi0: float, length: float, g: EllipseGeometry, n: float, cfg: IntegratorConfig) -> complex:
    _, outcome = flow_complex(z0, phi0, phi0 + length, g, n, cfg)
    if outcome.captured:
        raise UnexpectedCapture(f"capture at phi={outcome.s_crossing:.6g} inside a Poincare period (n={n})")
    if outcome.kind != "completed":
        raise IntegrationFailed(f"Poincare flow failed: {outcome.diagnostic}")
    return complex(outcome.final_state[0])


def poincare_map(
    z0: ComplexState | complex,
    phi0: float,
    g: EllipseGeometry,
    n: float,
    cfg: IntegratorConfig | None = None,
) -> ComplexState:
    """P(w) = z(phi0 + pi; w), the first return to the section phi = phi0 (mod pi)."""
    value = z0.z if isinstance(z0, ComplexState) else complex(z0)
    return ComplexState(z=_advance(value, phi0, math.pi, g, n, cfg or IntegratorConfig()))


def find_periodic_orbit(
    g: EllipseGeometry,
    n: float,
    phi0: float,
    seed: ComplexState | complex,
    cfg: IntegratorConfig | None = None,
    tol: float | None = None,
    max_iters: int | None = None,
) -> PoincareResult:
    """
    Plain fixed-point iteration of the Poincare map. The map is a global contraction
    for 0 < n < 1, so the iterates converge from any seed.
    """
    _require_subcritical(n)
    cfg = cfg or orbit_integrator_config()
    tol = tol if tol is not None else settings.ORBIT_TOL
    max_iters = max_iters if max_iters is not None else settings.ORBIT_MAX_ITERS

    z = seed.z if isinstance(seed, ComplexState) else complex(seed)
    iterates = [ComplexState(z=z)]
    step = math.inf
    for k in range(1, max_iters + 1):
        z_next = _advance(z, phi0, math.pi, g, n, cfg)
        iterates.append(ComplexState(z=z_next))
        step = abs(z_next - z)
        z = z_next
        if step < tol:
            residual = abs(_advance(z, phi0, math.pi, g, n, cfg) - z)
            if residual >= tol:
                logger.debug(f"Iteration {k}: step {step:.3e} below tol but residual {residual:.3e} is not")
                step = residual
                continue
            logger.info(f"Periodic orbit converged after {k} iterations: z*={z:.10f}, residual={residual:.3e}")
            return PoincareResult(
                fixed_point=ComplexState(z=z), iterates=iterates, residual=residual, iterations=k, phi0=phi0
            )

    logger.error(f"Periodic orbit did not converge in {max_iters} iterations (last residual {step:.3e})")
    raise MaxItersExceeded(
        f"fixed-point iteration did not reach tol={tol} in {max_iters} iterations", last_residual=step, iterations=max_iters
    )


# --- Contraction functionals ---


def distance_functional(z1: ComplexState | complex, z2: ComplexState | complex) -> float:
    """L = |z1 - z2|²."""
    a = z1.z if isinstance(z1, ComplexState) else complex(z1)
    b = z2.z if isinstance(z2, ComplexState) else complex(z2)
    return abs(a - b) ** 2


def distance_slope(
    z1: ComplexState | complex, z2: ComplexState | complex, phi: float, g: EllipseGeometry, n: float
) -> float:
    """dL/dphi = -(2n/f)(rho1 + rho2)(1 - cos(zeta1 - zeta2)) <= 0."""
    a = z1.z if isinstance(z1, ComplexState) else complex(z1)
    b = z2.z if isinstance(z2, ComplexState) else complex(z2)
    rho1, rho2 = abs(a), abs(b)
    if rho1 == 0 or rho2 == 0:
        raise ZeroModulus("distance slope undefined at z = 0")
    cos_diff = (a * b.conjugate()).real / (rho1 * rho2)
    f = float(geometry.angular_rate(g, phi))
    return -(2 * n / f) * (rho1 + rho2) * (1.0 - cos_diff)


def period_shift_functional(traj: Trajectory, phi: float) -> float:
    """D(phi) = |z(phi + pi) - z(phi)|² on a trajectory of the complex system."""
    values = traj.sample([phi, phi + math.pi])[:, 0]
    return float(abs(values[1] - values[0]) ** 2)


def contraction_report(
    g: EllipseGeometry,
    n: float,
    z1: ComplexState | complex,
    z2: ComplexState | complex,
    phi0: float,
    periods: int,
    cfg: IntegratorConfig | None = None,
    samples_per_pi: int = 32,
) -> ContractionReport:
    """Samples L for the pair and D for z1 over [phi0, phi0 + periods*pi]."""
    phi1 = phi0 + periods * math.pi
    traj1, out1 = flow_complex(z1, phi0, phi1 + math.pi, g, n, cfg)
    traj2, out2 = flow_complex(z2, phi0, phi1, g, n, cfg)
    for outcome in (out1, out2):
        if outcome.kind != "completed":
            raise IntegrationFailed(f"contraction run ended early: {outcome.kind} {outcome.diagnostic or ''}")

    grid = np.linspace(phi0, phi1, periods * samples_per_pi + 1)
    w1 = traj1.sample(grid)[:, 0]
    w2 = traj2.sample(grid)[:, 0]
    shifted = traj1.sample(grid + math.pi)[:, 0]
    L = np.abs(w1 - w2) ** 2
    D = np.abs(shifted - w1) ** 2
    slopes = np.diff(L) / np.diff(grid)
    return ContractionReport(
        L_samples=list(zip(grid.tolist(), L.tolist(), strict=True)),
        D_samples=list(zip(grid.tolist(), D.tolist(), strict=True)),
        max_positive_slope=float(slopes.max()) if slopes.size else 0.0,
    )


# --- Invariant annulus ---


def annulus_bounds(pursuer_start: geometry.Point, g: EllipseGeometry, r_measured: float | None = None) -> AnnulusBounds:
    """R0 = max(|P(phi0)|, a), N' = a + R0."""
    r0 = max(math.hypot(*pursuer_start), g.a)
    return AnnulusBounds(R0=r0, N_prime=g.a + r0, r_measured=r_measured)


def orbit_modulus_range(
    result: PoincareResult, g: EllipseGeometry, n: float, cfg: IntegratorConfig | None = None, samples: int = 512
) -> tuple[float, float]:
    """(min, max) of |z| over one period of a converged orbit."""
    traj, _ = flow_complex(result.fixed_point, result.phi0, result.phi0 + math.pi, g, n, cfg)
    grid = np.linspace(result.phi0, result.phi0 + math.pi, samples + 1)
    moduli = np.abs(traj.sample(grid)[:, 0])
    return float(moduli.min()), float(moduli.max())


def measure_inner_radius(
    result: PoincareResult, g: EllipseGeometry, n: float, cfg: IntegratorConfig | None = None, samples: int = 512
) -> float:
    """Minimum separation over one period of a converged orbit; an empirical stand-in for r."""
    return orbit_modulus_range(result, g, n, cfg, samples)[0]


def disk_trap_rate(
    pursuer: geometry.Point, evader: geometry.Point, n: float, g: EllipseGeometry
) -> tuple[float, float]:
    """
    (d|P|²/dt, bound) for unit evader speed; the rate never exceeds (2n|P|/rho)(a - |P|).
    """
    px, py = pursuer
    ex, ey = evader
    rho = math.hypot(ex - px, ey - py)
    if rho == 0:
        raise ZeroModulus("disk-trap rate undefined at zero separation")
    p_norm = math.hypot(px, py)
    rate = 2 * n * (px * ex + py * ey - p_norm**2) / rho
    bound = 2 * n * p_norm * (g.a - p_norm) / rho
    return rate, bound


# --- Seed sweeps ---


def seed_trajectories(
    g: EllipseGeometry,
    n: float,
    phi0: float,
    seeds: list[LogPolarState],
    phi_end: float,
    cfg: IntegratorConfig | None = None,
) -> list[Trajectory]:
    """Log-polar runs of each seed over [phi0, phi_end]; zeta keeps its winding."""
    field = dynamics.logpolar_phi_field(g, n)
    trajectories = []
    for seed in seeds:
        traj, outcome = integrate(field, np.array([seed.mu, seed.zeta]), (phi0, phi_end), cfg, sensor=LOG_SENSOR)
        if outcome.kind != "completed":
            raise IntegrationFailed(f"seed {seed} ended early: {outcome.kind} {outcome.diagnostic or ''}")
        trajectories.append(traj)
    return trajectories


def winding_offsets(final_zetas: list[float]) -> list[int]:
    """Branch of each final zeta relative to the first one, in units of 2pi."""
    if not final_zetas:
        return []
    return [round((z - final_zetas[0]) / (2 * math.pi)) for z in final_zetas]


def seed_sweep(
    g: EllipseGeometry,
    n: float,
    phi0: float,
    seeds: list[LogPolarState],
    span: float,
    window: float,
    cfg: IntegratorConfig | None = None,
    samples: int = 400,
) -> SeedSweepResult:
    """
    Integrates each seed in log-polar form over [phi0, phi0 + span] and compares the
    complex states over the final window; zeta keeps its winding so offsets are reported.
    """
    lo, hi = phi0 + span - window, phi0 + span
    grid = np.linspace(lo, hi, samples + 1)
    curves, final_zetas, moduli = [], [], []
    for traj in seed_trajectories(g, n, phi0, seeds, hi, cfg):
        states = traj.sample(grid)
        curves.append(np.exp(states[:, 0] + 1j * states[:, 1]))
        moduli.append(float(np.exp(traj.states[:, 0]).max()))
        final_zetas.append(float(states[-1, 1]))

    deviation = 0.0
    for c1, c2 in itertools.combinations(curves, 2):
        deviation = max(deviation, float(np.abs(c1 - c2).max()))
    return SeedSweepResult(
        window=(lo, hi),
        max_pairwise_deviation=deviation,
        winding_offsets=winding_offsets(final_zetas),
        max_modulus=moduli,
    )


# --- Parametrization invariance ---


def compare_parametrizations(
    g: EllipseGeometry,
    n: float,
    pursuer_start: geometry.Point,
    reparam: geometry.Reparametrization,
    t_span: tuple[float, float] = (0.0, 2 * math.pi),
    cfg: IntegratorConfig | None = None,
    samples: int = 400,
) -> float:
    """
    Integrates the Cartesian pursuit law against the standard ellipse path and against
    the same path reparametrized by u = reparam.map(t), then returns the largest distance
    between the two pursuers at matching evader positions.
    """
    t0, t1 = t_span
    grid = np.linspace(t0, t1, samples + 1)
    rates = np.array([reparam.rate(t) for t in grid])
    if np.any(rates <= 0):
        raise UnsupportedDirection(f"reparametrization {reparam.name} is not orientation preserving")

    base_path = geometry.standard_path(g)
    u0, u1 = reparam.map(t0), reparam.map(t1)
    start = np.array(pursuer_start, dtype=float)

    base_traj, base_out = integrate(dynamics.cartesian_field(base_path, n), start, (u0, u1), cfg)
    new_traj, new_out = integrate(
        dynamics.cartesian_field(geometry.reparametrized_path(base_path, reparam), n), start, (t0, t1), cfg
    )
    for outcome in (base_out, new_out):
        if outcome.kind != "completed":
            raise IntegrationFailed(f"Cartesian run failed: {outcome.diagnostic}")

    u_grid = np.clip(np.array([reparam.map(t) for t in grid]), u0, u1)
    deviation = np.linalg.norm(new_traj.sample(grid) - base_traj.sample(u_grid), axis=1)
    result = float(deviation.max())
    logger.info(f"Parametrization {reparam.name}: max pursuer deviation {result:.3e}")
    return result
