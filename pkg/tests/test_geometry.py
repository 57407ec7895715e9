import math

import numpy as np
import pytest
from scipy.special import ellipe

from src.core import geometry
from src.core.exceptions import UnsupportedDirection
from src.shared.models import EllipseGeometry


@pytest.mark.parametrize(
    "a, b, phi, expected",
    [
        (1.0, 1.0, 0.3, 1.0),
        (1.0, 1.0, 2.7, 1.0),
        (1.0, 0.5, 0.0, 0.5),
        (1.0, 0.5, math.pi / 2, 4.0),
    ],
)
def test_angular_rate_examples(a, b, phi, expected):
    assert geometry.angular_rate(EllipseGeometry(a=a, b=b), phi) == pytest.approx(expected, rel=1e-14)


def test_angular_rate_is_exact_on_circle():
    g = EllipseGeometry(a=2.0, b=2.0)
    rates = geometry.angular_rate(g, np.linspace(0, 7, 50))
    assert np.all(rates == 0.5)


def test_angular_rate_is_pi_periodic_and_positive(ellipse):
    phi = np.linspace(-5, 5, 301)
    rates = geometry.angular_rate(ellipse, phi)
    assert np.all(rates > 0)
    np.testing.assert_allclose(geometry.angular_rate(ellipse, phi + math.pi), rates, rtol=1e-12)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (1.0, 1.0, (1.0, 1.0)),
        (1.0, 0.5, (0.5, 4.0)),
        (2.0, 1.0, (0.25, 2.0)),
    ],
)
def test_rate_bounds(a, b, expected):
    g = EllipseGeometry(a=a, b=b)
    f_min, f_max = geometry.rate_bounds(g)
    assert (f_min, f_max) == pytest.approx(expected)

    rates = geometry.angular_rate(g, np.linspace(0, math.pi, 1001))
    assert rates.min() >= f_min * (1 - 1e-12)
    assert rates.max() <= f_max * (1 + 1e-12)


@pytest.mark.parametrize(
    "a, b, phi, expected",
    [
        (1.0, 0.5, math.pi / 2, (1.0, 0.0)),
        (1.0, 0.5, math.pi, (0.0, 0.5)),
        (1.0, 1.0, 0.0, (0.0, -1.0)),
    ],
)
def test_evader_position_examples(a, b, phi, expected):
    X, Y = geometry.evader_position(EllipseGeometry(a=a, b=b), phi)
    assert X == pytest.approx(expected[0], abs=1e-15)
    assert Y == pytest.approx(expected[1], abs=1e-15)


def test_evader_position_lies_on_ellipse_counterclockwise(ellipse):
    phi = np.linspace(0, 2 * math.pi, 200)
    X, Y = geometry.evader_position(ellipse, phi)
    np.testing.assert_allclose(X**2 / ellipse.a**2 + Y**2 / ellipse.b**2, 1.0, rtol=1e-14)
    # counterclockwise: polar angle of the point increases with phi
    angle = np.unwrap(np.arctan2(Y, X))
    assert np.all(np.diff(angle) > 0)


def test_unit_speed_velocity_is_tangent(ellipse):
    """dE/dt = dE/dphi * f(phi) must equal (cos phi, sin phi)."""
    h = 1e-5
    for phi in np.linspace(0.1, 6.0, 13):
        X1, Y1 = geometry.evader_position(ellipse, phi + h)
        X0, Y0 = geometry.evader_position(ellipse, phi - h)
        f = geometry.angular_rate(ellipse, phi)
        velocity = np.array([(X1 - X0) / (2 * h), (Y1 - Y0) / (2 * h)]) * f
        np.testing.assert_allclose(velocity, geometry.evader_velocity(phi), atol=1e-7)


def test_t_of_phi_circle_is_linear():
    g = EllipseGeometry(a=2.0, b=2.0)
    assert geometry.t_of_phi(g, 0.0, math.pi) == 2 * math.pi
    assert geometry.t_of_phi(g, 1.0, 1.0) == 0.0


def test_t_of_phi_full_turn_is_perimeter(ellipse):
    # perimeter = 4a E(m), m = 1 - b²/a²
    perimeter = 4 * ellipse.a * float(ellipe(1 - ellipse.b**2 / ellipse.a**2))
    assert geometry.t_of_phi(ellipse, 0.0, 2 * math.pi) == pytest.approx(perimeter, rel=1e-10)


def test_t_of_phi_at_elliptical_capture(ellipse):
    assert geometry.t_of_phi(ellipse, math.pi / 2, 3.151) == pytest.approx(1.229, abs=5e-3)


def test_t_of_phi_grid_matches_pointwise(ellipse):
    phis = np.linspace(0.5, 4.0, 9)
    grid = geometry.t_of_phi_grid(ellipse, 0.5, phis)
    expected = [geometry.t_of_phi(ellipse, 0.5, p) for p in phis]
    np.testing.assert_allclose(grid, expected, rtol=1e-10, atol=1e-13)
    assert geometry.t_of_phi_grid(ellipse, 0.0, np.array([])).size == 0


def test_tangent_angle_endpoints(ellipse):
    assert geometry.tangent_angle(ellipse, 0.0) == pytest.approx(math.pi / 2)
    assert geometry.tangent_angle(ellipse, math.pi) == pytest.approx(3 * math.pi / 2)


def test_tangent_angle_on_circle_is_shift(circle):
    u = np.linspace(0, 2 * math.pi, 25)
    np.testing.assert_allclose(geometry.tangent_angle(circle, u), u + math.pi / 2, atol=1e-15)


def test_standard_path_agrees_with_tangent_parametrization(ellipse):
    path = geometry.standard_path(ellipse)
    for u in np.linspace(0.05, 2 * math.pi - 0.05, 17):
        position, velocity = path(u)
        phi = geometry.tangent_angle(ellipse, u)
        np.testing.assert_allclose(geometry.evader_position(ellipse, phi), position, atol=1e-14)
        assert math.atan2(velocity[1], velocity[0]) == pytest.approx(math.remainder(phi, 2 * math.pi), abs=1e-12)


def test_reparametrized_path_uses_chain_rule(ellipse):
    path = geometry.standard_path(ellipse)
    reparam = geometry.sinusoidal_reparametrization(0.3)
    t = 1.1
    position, velocity = geometry.reparametrized_path(path, reparam)(t)
    base_position, base_velocity = path(t + 0.3 * math.sin(t))
    np.testing.assert_allclose(position, base_position)
    np.testing.assert_allclose(velocity, base_velocity * (1 + 0.3 * math.cos(t)))


def test_identity_reparametrization():
    identity = geometry.identity_reparametrization()
    assert identity.map(2.5) == 2.5
    assert identity.rate(2.5) == 1.0


def test_orientation_reversing_reparametrizations_rejected():
    with pytest.raises(UnsupportedDirection):
        geometry.sinusoidal_reparametrization(1.5)
    with pytest.raises(UnsupportedDirection):
        geometry.affine_reparametrization(scale=-1.0)
