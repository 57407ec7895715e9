import math

import pytest

from src.cli.scenario_loader import canonicalize, load_scenario, parse_scenario_text, scenario_digest
from src.core.exceptions import ScenarioError
from src.shared.models import Formulation, parse_real


@pytest.mark.parametrize(
    "text, expected",
    [
        ("pi", math.pi),
        ("2pi", 2 * math.pi),
        ("10*pi", 10 * math.pi),
        ("0.5pi", 0.5 * math.pi),
        ("pi/2", math.pi / 2),
        ("3*pi/4", 3 * math.pi / 4),
        ("-pi/2", -math.pi / 2),
        ("PI", math.pi),
    ],
)
def test_parse_real_pi_expressions(text, expected):
    assert parse_real(text) == pytest.approx(expected)


def test_parse_real_passes_other_values_through():
    assert parse_real("1.25") == "1.25"
    assert parse_real(3.0) == 3.0


def test_parse_scenario_text_reads_comments_and_pi():
    scenario = parse_scenario_text(
        "# slower pursuer\na=1\nb=0.5\nn=0.5\nrho0=1\nzeta0=pi/2\nspan=20pi\nformulation=complex-phi\n"
    )
    assert scenario.b == 0.5
    assert scenario.span == pytest.approx(20 * math.pi)
    assert scenario.phi0 == pytest.approx(math.pi / 2)
    assert scenario.initial_mu == 0.0
    assert scenario.formulation == Formulation.COMPLEX_PHI


def test_scenario_tolerances_default_to_settings():
    scenario = parse_scenario_text("a=1\nb=1\nn=1.2\nmu0=0\nspan=pi\n")
    assert scenario.integrator.rel_tol == 1e-10
    assert scenario.integrator.mu_min == -20.0


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("a=1\nb=1\nn=1.2\nmu0=0\nspan=pi\nspeed=3\n", "speed"),
        ("a=1\nb=1\nn=1.2\nmu0=0\nrho0=1\nspan=pi\n", "exactly one of mu0 or rho0"),
        ("a=1\nb=1\nn=1.2\nspan=pi\n", "exactly one of mu0 or rho0"),
        ("a=1\nb=1\nn=1.2\nmu0=0\nspan=0\n", "span"),
        ("a=0.5\nb=1\nn=1.2\nmu0=0\nspan=pi\n", "a=0.5"),
        ("a=1\nb=1\nn=1.2\nmu0=0\nspan=pi\nformulation=spherical\n", "formulation"),
        ("a=1\nb=0.5\nn=0.5\nmu0=0\nspan=pi\nformulation=polar-t\n", "circular"),
        ("a=1\nb=1\nn=1.2\nmu0=-25\nspan=pi\n", "capture threshold"),
        ("a=1\nb=1\nn=1.2\nrho0=1e-3\nmu_min=-5\nspan=pi\n", "capture threshold"),
    ],
)
def test_invalid_scenarios_raise_scenario_error(text, fragment):
    with pytest.raises(ScenarioError) as exc_info:
        parse_scenario_text(text, source="bad.env")
    assert "bad.env" in str(exc_info.value)
    assert fragment in str(exc_info.value)
    assert exc_info.value.original_error is not None


def test_empty_value_is_rejected():
    with pytest.raises(ScenarioError, match="n"):
        parse_scenario_text("a=1\nb=1\nn=\nmu0=0\nspan=pi\n")


def test_missing_file_raises_scenario_error(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "nope.env")


def test_load_scenario_from_file(write_scenario):
    path = write_scenario("capture", a=1, b=0.5, n=1.2, rho0=1, zeta0="pi/2", span="2pi")
    scenario = load_scenario(path)
    assert scenario.n == 1.2
    assert scenario.span == pytest.approx(2 * math.pi)


def test_canonicalize_is_a_fixed_point(write_scenario):
    scenario = load_scenario(write_scenario("orbit", a=1, b=0.5, n=0.5, rho0=1, zeta0="pi/2", span="20pi"))
    text = canonicalize(scenario)
    again = parse_scenario_text(text)
    assert again == scenario
    assert canonicalize(again) == text
    assert text.splitlines() == sorted(text.splitlines())


def test_digest_ignores_formatting_but_not_values():
    first = parse_scenario_text("a=1\nb=0.5\nn=1.2\nrho0=1\nspan=2pi\n")
    reordered = parse_scenario_text("# same run\nspan=6.283185307179586\nrho0=1.0\nn=1.2\nb=0.5\na=1.0\n")
    changed = parse_scenario_text("a=1\nb=0.5\nn=1.3\nrho0=1\nspan=2pi\n")
    assert scenario_digest(first) == scenario_digest(reordered)
    assert scenario_digest(first) != scenario_digest(changed)
    assert len(scenario_digest(first)) == 64
