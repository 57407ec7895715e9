import math

import numpy as np
import pandas as pd
import pytest

from src.core.exceptions import InvalidRegime
from src.core.simulation import run_scenario
from src.export.csv_writer import trajectory_frame, write_trajectory_csv
from src.export.portrait import equilibrium_marker, portrait_frame, write_plane_plot, write_portrait
from src.export.seed_plots import seed_frame, write_seed_plots
from src.shared.constants import ATTRACTION_SEEDS, ATTRACTION_SPAN, CSV_COLUMNS
from src.shared.models import LogPolarState


@pytest.fixture
def orbit_result(scenario_factory):
    return run_scenario(scenario_factory(1.0, 0.5, 0.5, 2 * math.pi))


def test_trajectory_frame_columns_and_first_row(orbit_result):
    frame = trajectory_frame(orbit_result, samples_per_pi=16)
    assert list(frame.columns) == CSV_COLUMNS
    first = frame.iloc[0]
    assert first["phi"] == pytest.approx(math.pi / 2)
    assert first["t"] == 0.0
    assert first["x"] == pytest.approx(0.0, abs=1e-12)
    assert first["y"] == pytest.approx(0.0, abs=1e-12)
    assert (first["X"], first["Y"]) == pytest.approx((1.0, 0.0))
    np.testing.assert_allclose(frame["rho"], np.exp(frame["mu"]), rtol=1e-15)


def test_trajectory_frame_pursuer_matches_separation(orbit_result):
    frame = trajectory_frame(orbit_result, samples_per_pi=16)
    separation = np.hypot(frame["X"] - frame["x"], frame["Y"] - frame["y"])
    np.testing.assert_allclose(separation, frame["rho"], rtol=1e-12)
    assert frame["t"].is_monotonic_increasing


def test_csv_is_deterministic(scenario_factory, tmp_path):
    scenario = scenario_factory(1.0, 0.5, 1.2, 2 * math.pi)
    first = write_trajectory_csv(run_scenario(scenario), tmp_path / "a" / "run.csv")
    second = write_trajectory_csv(run_scenario(scenario), tmp_path / "b" / "run.csv")
    assert first.read_bytes() == second.read_bytes()

    lines = first.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    frame = pd.read_csv(first)
    assert len(frame) == len(lines) - 1
    assert frame["phi"].iloc[-1] < math.pi / 2 + 2 * math.pi


def test_portrait_frame_wraps_zeta(scenario_factory):
    result = run_scenario(scenario_factory(1.0, 1.0, 0.5, 6 * math.pi))
    frame = portrait_frame(result, axis="mu", discard=math.pi)
    assert list(frame.columns) == ["phi", "mu", "zeta"]
    assert frame["phi"].min() >= result.phi0 + math.pi
    assert frame["zeta"].between(-math.pi, math.pi).all()


def test_portrait_frame_rejects_discarding_everything(orbit_result):
    with pytest.raises(InvalidRegime):
        portrait_frame(orbit_result, discard=10 * math.pi)


def test_equilibrium_marker(scenario_factory):
    circle = run_scenario(scenario_factory(1.0, 1.0, 0.5, math.pi))
    assert equilibrium_marker(circle, "rho") == pytest.approx((0.8660254, 1.0471976), abs=1e-7)
    assert equilibrium_marker(circle, "mu")[0] == pytest.approx(math.log(0.8660254), abs=1e-7)

    boundary = run_scenario(scenario_factory(1.0, 1.0, 1.0, math.pi))
    assert equilibrium_marker(boundary, "rho") == pytest.approx((0.0, math.pi / 2))
    assert equilibrium_marker(boundary, "mu") is None

    ellipse = run_scenario(scenario_factory(1.0, 0.5, 0.5, math.pi))
    assert equilibrium_marker(ellipse, "rho") is None


def test_write_portrait_files_are_reproducible(scenario_factory, tmp_path):
    scenario = scenario_factory(1.0, 1.0, 0.5, 4 * math.pi)
    data_a, svg_a = write_portrait(run_scenario(scenario), tmp_path / "a", stem="p")
    data_b, svg_b = write_portrait(run_scenario(scenario), tmp_path / "b", stem="p")
    assert data_a.name == "p.csv" and svg_a.name == "p.svg"
    assert svg_a.read_text(encoding="utf-8").lstrip().startswith("<?xml")
    assert data_a.read_bytes() == data_b.read_bytes()
    assert svg_a.read_bytes() == svg_b.read_bytes()


@pytest.mark.parametrize("n", [0.5, 1.2])
def test_plane_plot_is_reproducible(scenario_factory, tmp_path, n):
    scenario = scenario_factory(1.0, 0.5, n, 2 * math.pi)
    first = write_plane_plot(run_scenario(scenario), tmp_path / "a", stem="plane")
    second = write_plane_plot(run_scenario(scenario), tmp_path / "b", stem="plane")
    assert first.name == "plane.svg"
    assert first.read_text(encoding="utf-8").lstrip().startswith("<?xml")
    assert first.read_bytes() == second.read_bytes()


def test_seed_frame_layout(ellipse):
    seeds = [LogPolarState(mu=0.0, zeta=math.pi / 2), LogPolarState(mu=1.0, zeta=0.1)]
    frame = seed_frame(ellipse, 0.5, math.pi / 2, seeds, span=2 * math.pi, samples_per_pi=16)
    assert list(frame.columns) == ["seed", "phi", "mu", "zeta", "zeta_aligned", "winding_offset", "x", "y"]
    assert sorted(frame["seed"].unique()) == [1, 2]
    assert len(frame) == 2 * (2 * 16 + 1)
    first = frame[frame["seed"] == 1].iloc[0]
    assert first["mu"] == pytest.approx(0.0)
    assert (first["x"], first["y"]) == pytest.approx((0.0, 0.0), abs=1e-12)
    assert (frame[frame["seed"] == 1]["winding_offset"] == 0).all()
    np.testing.assert_allclose(frame["zeta"] - frame["zeta_aligned"], 2 * math.pi * frame["winding_offset"])


@pytest.mark.slow
def test_attraction_seeds_share_one_limit_after_alignment(ellipse):
    seeds = [LogPolarState(mu=mu, zeta=zeta) for mu, zeta in ATTRACTION_SEEDS]
    frame = seed_frame(ellipse, 0.5, math.pi / 2, seeds, span=ATTRACTION_SPAN, samples_per_pi=32)
    last_lap = frame[frame["phi"] >= frame["phi"].max() - 2 * math.pi]
    mu = last_lap.pivot(index="phi", columns="seed", values="mu").to_numpy()
    zeta = last_lap.pivot(index="phi", columns="seed", values="zeta_aligned").to_numpy()
    assert np.ptp(mu, axis=1).max() < 1e-3
    assert np.ptp(zeta, axis=1).max() < 1e-3


def test_seed_plots_are_written_reproducibly(ellipse, tmp_path):
    seeds = [LogPolarState(mu=0.0, zeta=math.pi / 2), LogPolarState(mu=-0.5, zeta=math.pi / 2)]
    frame = seed_frame(ellipse, 0.5, math.pi / 2, seeds, span=3 * math.pi, samples_per_pi=16)
    first = write_seed_plots(frame, ellipse, 0.5, tmp_path / "a", stem="s")
    second = write_seed_plots(frame, ellipse, 0.5, tmp_path / "b", stem="s")
    assert [p.name for p in first] == ["s.csv", "s.svg", "s.plane.svg"]
    for a, b in zip(first, second, strict=True):
        assert a.read_bytes() == b.read_bytes()
