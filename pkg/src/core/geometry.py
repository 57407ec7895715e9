"""
Evader geometry: the ellipse in tangent-angle parametrization, its angular rate f(phi),
and the conversion between unit-speed time t and the tangent angle phi.
"""

import math
from collections.abc import Callable
from typing import NamedTuple

import numpy as np
from scipy import integrate

from src.core.exceptions import UnsupportedDirection
from src.shared import constants
from src.shared.models import EllipseGeometry

Point = tuple[float, float]
# t -> (E(t), dE/dt)
EvaderPath = Callable[[float], tuple[np.ndarray, np.ndarray]]


def _radical(g: EllipseGeometry, phi):
    return np.sqrt(g.a**2 * np.sin(phi) ** 2 + g.b**2 * np.cos(phi) ** 2)


def angular_rate(g: EllipseGeometry, phi):
    """
    f(phi) = dphi/dt for an evader moving at unit speed.
    Works on scalars and numpy arrays; pi-periodic and strictly positive.
    """
    if g.circular:
        # exact 1/a, so the elliptical system reduces to the circular one without round-off
        return np.full_like(np.asarray(phi, dtype=float), 1.0 / g.a)[()]
    return _radical(g, phi) ** 3 / (g.a**2 * g.b**2)


def rate_bounds(g: EllipseGeometry) -> tuple[float, float]:
    """(f_min, f_max) = (b/a², a/b²), attained at phi = 0 and phi = pi/2 (mod pi)."""
    return g.b / g.a**2, g.a / g.b**2


def evader_position(g: EllipseGeometry, phi) -> tuple:
    """Point of the ellipse whose counterclockwise tangent direction is phi."""
    r = _radical(g, phi)
    return g.a**2 * np.sin(phi) / r, -(g.b**2) * np.cos(phi) / r


def evader_velocity(phi) -> tuple:
    """Unit tangent (cos phi, sin phi)."""
    return np.cos(phi), np.sin(phi)


def t_of_phi(g: EllipseGeometry, phi0: float, phi1: float) -> float:
    """Unit-speed time needed for the tangent angle to sweep from phi0 to phi1."""
    if phi1 == phi0:
        return 0.0
    if g.circular:
        return g.a * (phi1 - phi0)
    value, _ = integrate.quad(
        lambda p: 1.0 / angular_rate(g, p),
        phi0,
        phi1,
        epsabs=constants.QUAD_ABS_TOL,
        epsrel=constants.QUAD_REL_TOL,
        limit=constants.QUAD_LIMIT,
    )
    return float(value)


def t_of_phi_grid(g: EllipseGeometry, phi0: float, phis: np.ndarray) -> np.ndarray:
    """t_of_phi(g, phi0, phi) for a sorted grid, accumulated interval by interval."""
    phis = np.asarray(phis, dtype=float)
    if phis.size == 0:
        return phis.copy()
    if g.circular:
        return g.a * (phis - phi0)
    edges = np.concatenate(([phi0], phis))
    pieces = [t_of_phi(g, lo, hi) for lo, hi in zip(edges[:-1], edges[1:], strict=True)]
    return np.cumsum(pieces)


# --- Standard parametrization X = a cos u, Y = b sin u ---


def standard_path(g: EllipseGeometry) -> EvaderPath:
    """The textbook parametrization; not unit speed unless a == b == 1."""

    def path(u: float) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([g.a * math.cos(u), g.b * math.sin(u)]),
            np.array([-g.a * math.sin(u), g.b * math.cos(u)]),
        )

    return path


def tangent_angle(g: EllipseGeometry, u):
    """
    Unwrapped tangent angle phi of the standard parametrization at parameter u.
    phi(u) = u + pi/2 + delta(u) with |delta| < pi/2, so phi(0) = pi/2 and phi(pi) = 3pi/2.
    """
    s, c = np.sin(u), np.cos(u)
    delta = np.arctan2((g.a - g.b) * s * c, g.a * s**2 + g.b * c**2)
    return u + np.pi / 2 + delta


class Reparametrization(NamedTuple):
    """Orientation-preserving change of evader parameter u = map(t)."""

    name: str
    map: Callable[[float], float]
    rate: Callable[[float], float]


def identity_reparametrization() -> Reparametrization:
    return Reparametrization("identity", lambda t: t, lambda t: 1.0)


def sinusoidal_reparametrization(eps: float = 0.3) -> Reparametrization:
    if abs(eps) >= 1:
        raise UnsupportedDirection(f"t + {eps} sin t is not monotone; only counterclockwise motion is supported")
    return Reparametrization(
        f"t+{eps}sin(t)",
        lambda t: t + eps * math.sin(t),
        lambda t: 1.0 + eps * math.cos(t),
    )


def affine_reparametrization(scale: float = 2.0, shift: float = 0.0) -> Reparametrization:
    if scale <= 0:
        raise UnsupportedDirection(f"scale {scale} reverses the evader; only counterclockwise motion is supported")
    return Reparametrization(f"{scale}t+{shift}", lambda t: scale * t + shift, lambda t: scale)


def reparametrized_path(path: EvaderPath, reparam: Reparametrization) -> EvaderPath:
    """E(u(t)) with velocity E'(u) du/dt."""

    def composed(t: float) -> tuple[np.ndarray, np.ndarray]:
        position, velocity = path(reparam.map(t))
        return position, velocity * reparam.rate(t)

    return composed
