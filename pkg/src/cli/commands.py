import itertools
import json
import math
from pathlib import Path

import numpy as np
import pandas as pd

from src.cli.scenario_loader import load_scenario, scenario_digest
from src.cli.verification import VerificationContext, results_table, run_verification
from src.core import analysis, dynamics
from src.core.exceptions import IntegrationFailed, ScenarioError
from src.core.simulation import build_run_record, initial_pair, run_scenario
from src.export.csv_writer import write_trajectory_csv
from src.export.portrait import write_plane_plot, write_portrait
from src.export.seed_plots import seed_frame, write_seed_plots
from src.shared import constants
from src.shared.config import settings
from src.shared.logger import get_logger
from src.shared.models import ComplexState, LogPolarState, OutcomeKind

logger = get_logger(__name__)


def _output_dir(out: str | Path | None) -> Path:
    path = Path(out or settings.OUTPUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def _complex_json(z: complex) -> dict[str, float]:
    return {"re": z.real, "im": z.imag, "rho": abs(z), "zeta": math.atan2(z.imag, z.real)}


def cmd_simulate(config: str | Path, out: str | Path | None = None) -> int:
    """Writes <stem>.csv and <stem>.summary.json; a failed integration still leaves both behind."""
    scenario = load_scenario(config)
    digest = scenario_digest(scenario)
    out_dir = _output_dir(out)
    stem = Path(config).stem

    result = run_scenario(scenario)
    csv_path = write_trajectory_csv(result, out_dir / f"{stem}.csv")
    record = build_run_record(result, digest, str(csv_path))
    summary_path = _write_json(out_dir / f"{stem}.summary.json", record.model_dump(mode="json"))

    print(f"Outcome: {record.outcome}  phi_end={record.phi_end:.10g}")
    if record.capture and record.capture.captured:
        print(f"  phi_B={record.capture.phi_b_measured:.10g}  t_B={record.capture.t_b:.10g}")
    print(f"Wrote trajectory: {csv_path}")
    print(f"Wrote summary: {summary_path}")

    if result.outcome.kind == OutcomeKind.FAILED:
        raise IntegrationFailed(f"integration failed: {result.outcome.diagnostic}")
    return constants.EXIT_OK


def cmd_portrait(
    config: str | Path, out: str | Path | None = None, axis: str = "rho", discard: float = 0.0
) -> int:
    scenario = load_scenario(config)
    result = run_scenario(scenario)
    out_dir = _output_dir(out)
    stem = Path(config).stem
    data_path, svg_path = write_portrait(result, out_dir, stem=f"{stem}.portrait", axis=axis, discard=discard)
    plane_path = write_plane_plot(result, out_dir, stem=f"{stem}.plane")
    print(f"Wrote portrait data: {data_path}")
    print(f"Wrote portrait plot: {svg_path}")
    print(f"Wrote trajectory plot: {plane_path}")
    if result.outcome.kind == OutcomeKind.FAILED:
        raise IntegrationFailed(f"integration failed: {result.outcome.diagnostic}")
    return constants.EXIT_OK


def cmd_orbit(
    config: str | Path,
    out: str | Path | None = None,
    all_seeds: bool = False,
    samples: int = 256,
    seed_span: float | None = None,
) -> int:
    """
    Periodic orbit of the complex system from the scenario's initial state. With all_seeds the
    canonical attraction seeds are iterated too, their fixed points compared, and their mu/zeta
    curves over seed_span (default 20pi) written as <stem>.seeds.csv plus two SVG plots.
    """
    scenario = load_scenario(config)
    if not 0 < scenario.n < 1:
        raise ScenarioError(f"periodic-orbit analysis needs 0 < n < 1, got n={scenario.n}")
    g = scenario.geometry
    seed = dynamics.to_complex(scenario.initial_state)
    result = analysis.find_periodic_orbit(g, scenario.n, scenario.phi0, seed)

    traj, _ = analysis.flow_complex(
        result.fixed_point, scenario.phi0, scenario.phi0 + math.pi, g, scenario.n, analysis.orbit_integrator_config()
    )
    phis = np.linspace(scenario.phi0, scenario.phi0 + math.pi, samples + 1)
    z = traj.sample(phis)[:, 0]
    r_measured = float(np.abs(z).min())
    annulus = analysis.annulus_bounds(initial_pair(scenario).pursuer, g, r_measured=r_measured)

    report = {
        "digest": scenario_digest(scenario),
        "fixed_point": _complex_json(result.fixed_point.z),
        "residual": result.residual,
        "iterations": result.iterations,
        "rho_min": r_measured,
        "rho_max": float(np.abs(z).max()),
        "annulus": annulus.model_dump(),
    }

    out_dir = _output_dir(out)
    stem = Path(config).stem
    if all_seeds:
        fixed_points = [result.fixed_point.z]
        for mu0, zeta0 in constants.ATTRACTION_SEEDS:
            other = analysis.find_periodic_orbit(g, scenario.n, scenario.phi0, seed_state(mu0, zeta0))
            fixed_points.append(other.fixed_point.z)
        report["seed_fixed_points"] = [_complex_json(w) for w in fixed_points[1:]]
        report["max_seed_deviation"] = max(abs(p - q) for p, q in itertools.combinations(fixed_points, 2))

        seeds = [LogPolarState(mu=mu0, zeta=zeta0) for mu0, zeta0 in constants.ATTRACTION_SEEDS]
        frame = seed_frame(g, scenario.n, scenario.phi0, seeds, seed_span or constants.ATTRACTION_SPAN)
        seed_paths = write_seed_plots(frame, g, scenario.n, out_dir, stem=f"{stem}.seeds")
        offsets = frame.groupby("seed", sort=True)["winding_offset"].first()
        report["seed_winding_offsets"] = [int(k) for k in offsets]
        report["seed_outputs"] = [str(p) for p in seed_paths]

    orbit_path = out_dir / f"{stem}.orbit.csv"
    pd.DataFrame(
        {"phi": phis, "rho": np.abs(z), "zeta": np.angle(z), "re": z.real, "im": z.imag}
    ).to_csv(orbit_path, index=False, float_format=constants.CSV_FLOAT_FORMAT, lineterminator="\n")
    report_path = _write_json(out_dir / f"{stem}.orbit.json", report)

    print(f"Fixed point z* = {result.fixed_point.z:.12f}  (residual {result.residual:.3e}, {result.iterations} iterations)")
    print(f"rho range on the orbit: [{r_measured:.6f}, {report['rho_max']:.6f}]  N'={annulus.N_prime:g}")
    if all_seeds:
        print(f"Max deviation between seed fixed points: {report['max_seed_deviation']:.3e}")
        print(f"Seed winding offsets (2pi units): {report['seed_winding_offsets']}")
        for path in report["seed_outputs"]:
            print(f"Wrote seed convergence output: {path}")
    print(f"Wrote orbit samples: {orbit_path}")
    print(f"Wrote orbit report: {report_path}")
    return constants.EXIT_OK


def cmd_capture(config: str | Path, out: str | Path | None = None) -> int:
    """Measured blow-up against both bounds, printed and written as JSON."""
    scenario = load_scenario(config)
    result = run_scenario(scenario)
    if result.outcome.kind == OutcomeKind.FAILED:
        raise IntegrationFailed(f"integration failed: {result.outcome.diagnostic}")
    report = analysis.capture_report(
        scenario.geometry, scenario.n, scenario.initial_mu, scenario.phi0, result.outcome
    )
    payload = report.model_dump(mode="json") | {
        "measured_span": report.measured_span,
        "within_bounds": report.within_bounds if report.captured else None,
    }
    report_path = _write_json(_output_dir(out) / f"{Path(config).stem}.capture.json", payload)
    print(json.dumps(payload, indent=2))
    print(f"Wrote capture report: {report_path}")
    return constants.EXIT_OK


def seed_state(mu0: float, zeta0: float) -> ComplexState:
    return dynamics.to_complex(LogPolarState(mu=mu0, zeta=zeta0))


def cmd_verify(
    cases: list[int] | None = None,
    out: str | Path | None = None,
    bound_scale: float = 1.0,
    workers: int | None = None,
) -> int:
    """Runs the acceptance suite and prints the pass/fail table; exit 3 when any criterion fails."""
    ctx = VerificationContext(bound_scale=bound_scale, out_dir=Path(out) if out else None)
    results = run_verification(cases, ctx, workers)
    print(results_table(results))
    failed = sum(not r.passed for r in results)
    print(f"\n{len(results) - failed}/{len(results)} criteria passed")
    return constants.EXIT_OK if failed == 0 else constants.EXIT_VERIFICATION_FAILED
