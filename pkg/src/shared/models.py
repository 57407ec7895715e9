import math
import re
from enum import StrEnum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.shared import constants
from src.shared.config import settings

# Accepts "pi", "2pi", "10*pi", "0.5pi", "pi/2", "3*pi/4", "-pi/2"
_PI_EXPR = re.compile(r"^\s*(?P<coef>[-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d+)?))?\s*$", re.IGNORECASE)


def parse_real(v: Any) -> Any:
    """Coerce scenario text such as '10pi' or 'pi/2' into a float; anything else passes through."""
    if not isinstance(v, str):
        return v
    text = v.strip()
    match = _PI_EXPR.match(text)
    if not match:
        return text
    coef = match.group("coef")
    if coef in ("", "+"):
        value = 1.0
    elif coef == "-":
        value = -1.0
    else:
        value = float(coef)
    value *= math.pi
    if match.group("den"):
        value /= float(match.group("den"))
    return value


class Formulation(StrEnum):
    CARTESIAN = "cartesian"
    POLAR_T = "polar-t"
    POLAR_PHI = "polar-phi"
    LOGPOLAR_PHI = "logpolar-phi"
    COMPLEX_PHI = "complex-phi"


class EquilibriumClass(StrEnum):
    STABLE_SPIRAL = "stable-spiral"
    STABLE_NODE = "stable-node"
    DEGENERATE = "degenerate"


class OutcomeKind(StrEnum):
    COMPLETED = "completed"
    CAPTURED = "captured"
    FAILED = "failed"


# --- Geometry & states ---


class EllipseGeometry(BaseModel):
    """Evader's ellipse X²/a² + Y²/b² = 1, orbited counterclockwise."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(..., gt=0, description="Semi-major axis")
    b: float = Field(..., gt=0, description="Semi-minor axis")

    @model_validator(mode="after")
    def check_axis_order(self) -> "EllipseGeometry":
        if self.a < self.b:
            raise ValueError(f"semi-major axis a={self.a} must be >= semi-minor axis b={self.b}")
        return self

    @property
    def circular(self) -> bool:
        return self.a == self.b


class CartesianPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    evader: tuple[float, float]
    pursuer: tuple[float, float]

    @property
    def separation(self) -> float:
        return math.hypot(self.evader[0] - self.pursuer[0], self.evader[1] - self.pursuer[1])


class PolarState(BaseModel):
    """Separation rho and angle difference zeta = phi - theta (unwrapped)."""

    model_config = ConfigDict(frozen=True)

    rho: float
    zeta: float


class LogPolarState(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float = Field(..., description="log of the separation")
    zeta: float

    @field_validator("mu")
    @classmethod
    def mu_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("mu must be finite; capture is mu -> -inf and is never stored")
        return v

    @property
    def rho(self) -> float:
        return math.exp(self.mu)


class ComplexState(BaseModel):
    """z = exp(mu + i*zeta); |z| is the separation, arg z the angle difference mod 2pi."""

    model_config = ConfigDict(frozen=True)

    z: complex

    @property
    def modulus(self) -> float:
        return abs(self.z)


# --- Integration ---


class IntegratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default_factory=lambda: settings.REL_TOL, gt=0)
    abs_tol: float = Field(default_factory=lambda: settings.ABS_TOL, gt=0)
    max_step: float = Field(math.inf, gt=0)
    mu_min: float = Field(default_factory=lambda: settings.MU_MIN, lt=0, description="Capture threshold on mu")
    event_tol: float = Field(default_factory=lambda: settings.EVENT_TOL, gt=0)
    method: str = Field(constants.DEFAULT_METHOD, description="scipy solve_ivp explicit method")


# --- Scenario ---


class Scenario(BaseModel):
    """A complete problem instance, as read from a key=value scenario file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float = Field(..., gt=0)
    b: float = Field(..., gt=0)
    n: float = Field(..., gt=0, description="Pursuer speed divided by evader speed")
    phi0: float = constants.CANONICAL_PHI0
    mu0: float | None = None
    rho0: float | None = None
    zeta0: float = constants.CANONICAL_ZETA0
    span: float = Field(..., gt=0, description="Length of the phi interval to integrate")
    rel_tol: float = Field(default_factory=lambda: settings.REL_TOL, gt=0)
    abs_tol: float = Field(default_factory=lambda: settings.ABS_TOL, gt=0)
    mu_min: float = Field(default_factory=lambda: settings.MU_MIN, lt=0)
    formulation: Formulation = Formulation.LOGPOLAR_PHI

    @field_validator("a", "b", "n", "phi0", "mu0", "rho0", "zeta0", "span", "rel_tol", "abs_tol", "mu_min", mode="before")
    @classmethod
    def accept_pi_multiples(cls, v):
        return parse_real(v)

    @model_validator(mode="after")
    def check_consistency(self) -> "Scenario":
        if self.a < self.b:
            raise ValueError(f"a={self.a} must be >= b={self.b}")
        if (self.mu0 is None) == (self.rho0 is None):
            raise ValueError("exactly one of mu0 or rho0 must be given")
        if self.rho0 is not None and self.rho0 <= 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")
        if self.mu0 is not None and not math.isfinite(self.mu0):
            raise ValueError("mu0 must be finite")
        if self.initial_mu <= self.mu_min:
            raise ValueError(f"initial mu={self.initial_mu} must lie above the capture threshold mu_min={self.mu_min}")
        if self.formulation == Formulation.POLAR_T and self.a != self.b:
            raise ValueError("formulation polar-t is only defined for a circular evader (a == b)")
        return self

    @property
    def geometry(self) -> EllipseGeometry:
        return EllipseGeometry(a=self.a, b=self.b)

    @property
    def initial_mu(self) -> float:
        return self.mu0 if self.mu0 is not None else math.log(self.rho0)

    @property
    def initial_state(self) -> LogPolarState:
        return LogPolarState(mu=self.initial_mu, zeta=self.zeta0)

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol, mu_min=self.mu_min)


class RunRecord(BaseModel):
    """Summary written next to every exported trajectory."""

    digest: str = Field(..., description="SHA-256 of the canonical scenario text")
    scenario: dict[str, Any]
    trajectory_path: str | None = None
    outcome: OutcomeKind
    diagnostic: str | None = None
    phi_end: float | None = None
    final_state: dict[str, float] | None = None
    capture: "CaptureReport | None" = None
    equilibrium: "EquilibriumReport | None" = None
    bounds: dict[str, float] = Field(default_factory=dict)


# --- Analysis reports ---


class EquilibriumReport(BaseModel):
    rho_star: float
    zeta_star: float
    jacobian: list[list[float]]
    eigenvalues: tuple[complex, complex]
    classification: EquilibriumClass


class CaptureReport(BaseModel):
    """Measured blow-up against both analytic bounds; bounds are phi-spans measured from phi0."""

    phi0: float
    mu0: float
    captured: bool
    phi_b_measured: float | None = Field(None, description="Extrapolated blow-up value of phi")
    phi_b_crossing: float | None = Field(None, description="phi at which mu crossed mu_min")
    t_b: float | None = Field(None, description="Unit-speed evader time of capture")
    upper_bound: float | None = Field(None, description="Upper bound on phi_B - phi0 (n > 1 only)")
    guaranteed_upper_bound: float | None = Field(
        None, description="Upper bound on phi_B - phi0 from the largest angular rate (n > 1 only)"
    )
    lower_bound: float = Field(..., description="Lower bound on phi_B - phi0")

    @property
    def measured_span(self) -> float | None:
        return None if self.phi_b_measured is None else self.phi_b_measured - self.phi0

    @property
    def within_bounds(self) -> bool:
        span = self.measured_span
        if span is None:
            return False
        if self.upper_bound is not None and span > self.upper_bound:
            return False
        return self.lower_bound <= span


class PoincareResult(BaseModel):
    fixed_point: ComplexState
    iterates: list[ComplexState] = Field(default_factory=list)
    residual: float = Field(..., description="|P(z*) - z*|")
    iterations: int
    phi0: float


class AnnulusBounds(BaseModel):
    R0: float = Field(..., description="max(|P(phi0)|, a)")
    N_prime: float = Field(..., description="a + R0, upper bound on the separation")
    r_measured: float | None = Field(None, description="Empirical minimum separation on the limit orbit")


class ContractionReport(BaseModel):
    L_samples: list[tuple[float, float]] = Field(default_factory=list)
    D_samples: list[tuple[float, float]] = Field(default_factory=list)
    max_positive_slope: float = Field(..., description="Largest finite-difference dL/dphi observed")


class SeedSweepResult(BaseModel):
    """Outcome of integrating several initial conditions and comparing them over a final window."""

    window: tuple[float, float]
    max_pairwise_deviation: float
    winding_offsets: list[int] = Field(default_factory=list, description="Final zeta branch of each seed, in units of 2pi")
    max_modulus: list[float] = Field(default_factory=list)


class VerificationResult(BaseModel):
    case: int
    criterion: str
    passed: bool
    detail: str = ""


RunRecord.model_rebuild()
