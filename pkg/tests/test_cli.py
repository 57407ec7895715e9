import json

import pytest

from src.cli.app import build_parser, main
from src.core.exceptions import IntegrationFailed
from src.shared import constants


@pytest.fixture
def capture_config(write_scenario):
    return write_scenario("capture", a=1, b=0.5, n=1.2, rho0=1, zeta0="pi/2", span="2pi")


def test_simulate_writes_trajectory_and_summary(capture_config, tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(capture_config), "--out", str(out)]) == constants.EXIT_OK

    assert (out / "capture.csv").exists()
    summary = json.loads((out / "capture.summary.json").read_text(encoding="utf-8"))
    assert summary["outcome"] == "captured"
    assert len(summary["digest"]) == 64
    assert summary["capture"]["phi_b_measured"] == pytest.approx(3.0028419, abs=1e-5)
    assert summary["bounds"]["blowup_upper_bound"] == pytest.approx(2.5)


def test_simulate_defaults_to_configured_output_dir(capture_config, tmp_path):
    assert main(["simulate", "--config", str(capture_config)]) == constants.EXIT_OK
    assert (tmp_path / "runs" / "capture.csv").exists()
    assert (tmp_path / "runs" / "capture.summary.json").exists()


def test_invalid_scenario_exits_with_config_error(write_scenario, tmp_path):
    config = write_scenario("bad", a=1, b=1, n=1.2, mu0=0, span=0)
    assert main(["simulate", "--config", str(config), "--out", str(tmp_path)]) == constants.EXIT_CONFIG_ERROR


def test_missing_config_file_exits_with_config_error(tmp_path):
    assert main(["capture", "--config", str(tmp_path / "missing.env")]) == constants.EXIT_CONFIG_ERROR


def test_usage_errors_exit_with_config_error():
    with pytest.raises(SystemExit) as exc_info:
        build_parser().parse_args(["simulate"])
    assert exc_info.value.code == constants.EXIT_CONFIG_ERROR

    with pytest.raises(SystemExit) as exc_info:
        main(["verify", "--case", "9"])
    assert exc_info.value.code == constants.EXIT_CONFIG_ERROR


def test_orbit_rejects_capture_regime(capture_config, tmp_path):
    assert main(["orbit", "--config", str(capture_config), "--out", str(tmp_path)]) == constants.EXIT_CONFIG_ERROR


def test_orbit_writes_report(write_scenario, tmp_path):
    config = write_scenario("orbit", a=1, b=0.5, n=0.5, rho0=1, zeta0="pi/2", span="pi")
    assert main(["orbit", "--config", str(config), "--out", str(tmp_path)]) == constants.EXIT_OK
    report = json.loads((tmp_path / "orbit.orbit.json").read_text(encoding="utf-8"))
    assert report["residual"] < 1e-10
    assert 0.35 <= report["rho_min"] < report["rho_max"] <= 0.85
    assert report["annulus"]["N_prime"] == 2.0
    assert (tmp_path / "orbit.orbit.csv").exists()


def test_capture_report_json(capture_config, tmp_path, capsys):
    assert main(["capture", "--config", str(capture_config), "--out", str(tmp_path)]) == constants.EXIT_OK
    payload = json.loads((tmp_path / "capture.capture.json").read_text(encoding="utf-8"))
    assert payload["captured"] is True
    assert payload["within_bounds"] is True
    assert payload["lower_bound"] <= payload["measured_span"] <= payload["upper_bound"]
    assert "Wrote capture report" in capsys.readouterr().out


def test_portrait_command(write_scenario, tmp_path):
    config = write_scenario("eq", a=1, b=1, n=0.5, rho0=1, zeta0="pi/2", span="4pi")
    code = main(["portrait", "--config", str(config), "--out", str(tmp_path), "--axis", "mu", "--discard", "3.14"])
    assert code == constants.EXIT_OK
    assert (tmp_path / "eq.portrait.csv").exists()
    assert (tmp_path / "eq.portrait.svg").exists()
    assert (tmp_path / "eq.plane.svg").exists()


def test_numerical_failure_exits_with_code_two(capture_config, tmp_path, mocker):
    mocker.patch("src.cli.commands.run_scenario", side_effect=IntegrationFailed("step size underflow"))
    assert main(["simulate", "--config", str(capture_config), "--out", str(tmp_path)]) == constants.EXIT_NUMERICAL_FAILURE


def test_verify_single_case_passes(tmp_path, capsys):
    assert main(["verify", "--case", "7", "--out", str(tmp_path)]) == constants.EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_verify_negative_control_fails(capsys):
    assert main(["verify", "--case", "1", "--bound-scale", "0.1"]) == constants.EXIT_VERIFICATION_FAILED
    assert "FAIL" in capsys.readouterr().out


def test_start_below_capture_threshold_is_a_config_error(write_scenario, tmp_path):
    config = write_scenario("deep", a=1, b=1, n=1.2, mu0=-25, span="pi")
    assert main(["simulate", "--config", str(config), "--out", str(tmp_path)]) == constants.EXIT_CONFIG_ERROR


@pytest.mark.slow
def test_orbit_all_seeds_writes_convergence_plots(write_scenario, tmp_path):
    config = write_scenario("orbit", a=1, b=0.5, n=0.5, rho0=1, zeta0="pi/2", span="pi")
    code = main(["orbit", "--config", str(config), "--out", str(tmp_path), "--all-seeds", "--seed-span", "4pi"])
    assert code == constants.EXIT_OK
    report = json.loads((tmp_path / "orbit.orbit.json").read_text(encoding="utf-8"))
    assert report["max_seed_deviation"] < 1e-6
    assert len(report["seed_winding_offsets"]) == len(constants.ATTRACTION_SEEDS)
    assert report["seed_winding_offsets"][0] == 0
    for name in ("orbit.seeds.csv", "orbit.seeds.svg", "orbit.seeds.plane.svg"):
        assert (tmp_path / name).exists()


def test_seed_span_must_be_a_number():
    with pytest.raises(SystemExit) as exc_info:
        build_parser().parse_args(["orbit", "--config", "x.env", "--seed-span", "lots"])
    assert exc_info.value.code == constants.EXIT_CONFIG_ERROR
