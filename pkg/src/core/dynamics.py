"""
Right-hand sides of every pursuit formulation and the conversions between state representations.

Typed functions (PolarState, LogPolarState, ComplexState in, tuples out) are the reference
definitions. The *_field factories wrap the same formulas as solve_ivp callables
f(s, y) -> dy/ds over plain arrays.
"""

import cmath
import math
from collections.abc import Callable

import numpy as np

from src.core.exceptions import InvalidRegime, ZeroModulus, ZeroSeparation
from src.core.geometry import EvaderPath, Point, angular_rate, evader_position
from src.shared.models import CartesianPair, ComplexState, EllipseGeometry, LogPolarState, PolarState

VectorField = Callable[[float, np.ndarray], np.ndarray]


def _rate(g: EllipseGeometry, phi: float) -> float:
    return float(angular_rate(g, phi))


def _rewind(angle: float, reference: float | None) -> float:
    """Move angle by a multiple of 2pi onto the branch nearest reference."""
    if reference is None:
        return angle
    return reference + math.remainder(angle - reference, 2 * math.pi)


# --- Cartesian (pursuer velocity law) ---


def pursuit_velocity(evader: Point, evader_velocity: Point, pursuer: Point, n: float) -> tuple[float, float]:
    """Velocity of magnitude n|dE/dt| pointing from the pursuer at the evader."""
    dx = evader[0] - pursuer[0]
    dy = evader[1] - pursuer[1]
    separation = math.hypot(dx, dy)
    if separation == 0.0:
        raise ZeroSeparation("pursuit direction undefined: pursuer and evader coincide")
    speed = n * math.hypot(evader_velocity[0], evader_velocity[1])
    return speed * dx / separation, speed * dy / separation


def cartesian_rhs(t: float, pursuer: Point, evader_path: EvaderPath, n: float) -> tuple[float, float]:
    """Pursuer velocity at time t against an evader following evader_path."""
    position, velocity = evader_path(t)
    return pursuit_velocity((position[0], position[1]), (velocity[0], velocity[1]), pursuer, n)


def lambda_of(rho: float, n: float) -> float:
    if n <= 0:
        raise InvalidRegime(f"speed ratio must be positive, got n={n}")
    return rho / n


# --- Polar (rho, zeta) ---


def circular_rhs_t(s: PolarState, a: float, n: float) -> tuple[float, float]:
    if s.rho == 0.0:
        raise ZeroSeparation("circular system is singular at rho = 0")
    return math.cos(s.zeta) - n, -math.sin(s.zeta) / s.rho + 1.0 / a


def circular_rhs_phi(s: PolarState, a: float, n: float) -> tuple[float, float]:
    if s.rho == 0.0:
        raise ZeroSeparation("circular system is singular at rho = 0")
    return a * (math.cos(s.zeta) - n), 1.0 - a * math.sin(s.zeta) / s.rho


def elliptical_rhs_phi(s: PolarState, phi: float, g: EllipseGeometry, n: float) -> tuple[float, float]:
    if s.rho == 0.0:
        raise ZeroSeparation("elliptical system is singular at rho = 0")
    f = _rate(g, phi)
    return (math.cos(s.zeta) - n) / f, 1.0 - math.sin(s.zeta) / (s.rho * f)


# --- Log-polar (mu, zeta) ---


def logpolar_rhs_t(s: LogPolarState, phidot: float, n: float) -> tuple[float, float]:
    m = math.exp(-s.mu)
    return m * (math.cos(s.zeta) - n), -m * math.sin(s.zeta) + phidot


def logpolar_rhs_phi(s: LogPolarState, phi: float, g: EllipseGeometry, n: float) -> tuple[float, float]:
    m = math.exp(-s.mu)
    f = _rate(g, phi)
    return m * (math.cos(s.zeta) - n) / f, 1.0 - m * math.sin(s.zeta) / f


# --- Complex z = exp(mu + i zeta) ---


def _complex_rhs(z: complex, f: float, n: float) -> complex:
    modulus = abs(z)
    if modulus == 0.0:
        raise ZeroModulus("complex system is singular at z = 0")
    return 1.0 / f - (n / f) * (z / modulus) + 1j * z


def complex_rhs_phi(z: ComplexState | complex, phi: float, g: EllipseGeometry, n: float) -> complex:
    value = z.z if isinstance(z, ComplexState) else complex(z)
    return _complex_rhs(value, _rate(g, phi), n)


# --- Conversions ---


def to_complex(s: LogPolarState) -> ComplexState:
    return ComplexState(z=cmath.exp(complex(s.mu, s.zeta)))


def from_complex(z: ComplexState | complex, reference: float | None = None) -> LogPolarState:
    """
    Inverse of to_complex. zeta comes back in (-pi, pi] unless a reference angle is given,
    in which case it lands on the branch nearest the reference.
    """
    value = z.z if isinstance(z, ComplexState) else complex(z)
    modulus = abs(value)
    if modulus == 0.0:
        raise ZeroModulus("z = 0 has no logarithm")
    return LogPolarState(mu=math.log(modulus), zeta=_rewind(cmath.phase(value), reference))


def polar_to_logpolar(s: PolarState) -> LogPolarState:
    if s.rho <= 0.0:
        raise ZeroSeparation(f"log-polar form needs rho > 0, got {s.rho}")
    return LogPolarState(mu=math.log(s.rho), zeta=s.zeta)


def logpolar_to_polar(s: LogPolarState) -> PolarState:
    return PolarState(rho=math.exp(s.mu), zeta=s.zeta)


def reconstruct_pursuer(s: PolarState, phi: float, g: EllipseGeometry) -> tuple[float, float]:
    """Pursuer position from the reduced state, the evader sitting at tangent angle phi."""
    X, Y = evader_position(g, phi)
    heading = phi - s.zeta
    return float(X - s.rho * math.cos(heading)), float(Y - s.rho * math.sin(heading))


def reconstruct_pursuer_circular(s: PolarState, t: float, a: float) -> tuple[float, float]:
    """
    Circular evader at unit speed, E(t) = (a cos(t/a), a sin(t/a)), phi = t/a + pi/2.
    """
    if a <= 0:
        raise InvalidRegime(f"radius must be positive, got a={a}")
    angle = t / a
    heading = angle + math.pi / 2 - s.zeta
    return a * math.cos(angle) - s.rho * math.cos(heading), a * math.sin(angle) - s.rho * math.sin(heading)


def cartesian_to_reduced(p: CartesianPair, phi: float, reference: float | None = None) -> PolarState:
    dx = p.evader[0] - p.pursuer[0]
    dy = p.evader[1] - p.pursuer[1]
    rho = math.hypot(dx, dy)
    if rho == 0.0:
        raise ZeroSeparation("reduced state undefined at zero separation")
    return PolarState(rho=rho, zeta=_rewind(phi - math.atan2(dy, dx), reference))


# --- solve_ivp vector fields ---


def polar_t_field(a: float, n: float) -> VectorField:
    """y = [rho, zeta], s = t (circular evader only)."""
    inv_a = 1.0 / a

    def field(t: float, y: np.ndarray) -> np.ndarray:
        rho, zeta = y
        if rho == 0.0:
            raise ZeroSeparation("circular system is singular at rho = 0")
        return np.array([math.cos(zeta) - n, -math.sin(zeta) / rho + inv_a])

    return field


def polar_phi_field(g: EllipseGeometry, n: float) -> VectorField:
    """y = [rho, zeta], s = phi."""

    def field(phi: float, y: np.ndarray) -> np.ndarray:
        rho, zeta = y
        if rho == 0.0:
            raise ZeroSeparation("elliptical system is singular at rho = 0")
        f = _rate(g, phi)
        return np.array([(math.cos(zeta) - n) / f, 1.0 - math.sin(zeta) / (rho * f)])

    return field


def logpolar_phi_field(g: EllipseGeometry, n: float) -> VectorField:
    """y = [mu, zeta], s = phi."""

    def field(phi: float, y: np.ndarray) -> np.ndarray:
        mu, zeta = y
        m = math.exp(-mu)
        f = _rate(g, phi)
        return np.array([m * (math.cos(zeta) - n) / f, 1.0 - m * math.sin(zeta) / f])

    return field


def complex_phi_field(g: EllipseGeometry, n: float) -> VectorField:
    """y = [z] (complex), s = phi."""

    def field(phi: float, y: np.ndarray) -> np.ndarray:
        return np.array([_complex_rhs(complex(y[0]), _rate(g, phi), n)])

    return field


def cartesian_field(evader_path: EvaderPath, n: float) -> VectorField:
    """y = [x, y] pursuer position, s = the evader path's own parameter."""

    def field(t: float, y: np.ndarray) -> np.ndarray:
        return np.array(cartesian_rhs(t, (y[0], y[1]), evader_path, n))

    return field


def cartesian_unit_speed_field(g: EllipseGeometry, n: float) -> VectorField:
    """
    y = [x, y, phi], s = unit-speed time. The evader's tangent angle is carried
    along with dphi/dt = f(phi), which makes the evader path arc-length parametrized.
    """

    def field(t: float, y: np.ndarray) -> np.ndarray:
        phi = y[2]
        X, Y = evader_position(g, phi)
        vx, vy = pursuit_velocity((X, Y), (math.cos(phi), math.sin(phi)), (y[0], y[1]), n)
        return np.array([vx, vy, _rate(g, phi)])

    return field
