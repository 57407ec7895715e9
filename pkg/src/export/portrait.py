"""
Phase portraits of a simulated scenario, a (rho, zeta) or (mu, zeta) sample table with its SVG
plot, and the pursuer and evader paths in the physical plane.
"""

from pathlib import Path
from typing import Literal

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from src.core import analysis  # noqa: E402
from src.core.exceptions import InvalidRegime, NoEquilibrium  # noqa: E402
from src.core.simulation import SimulationResult  # noqa: E402
from src.export.csv_writer import trajectory_frame  # noqa: E402
from src.shared.constants import CSV_FLOAT_FORMAT  # noqa: E402
from src.shared.logger import get_logger  # noqa: E402

logger = get_logger(__name__)

Axis = Literal["rho", "mu"]

# fixed ids and no timestamp so identical runs give identical files
_SVG_RC = {"svg.hashsalt": "pursuit-portrait", "svg.fonttype": "path"}


def portrait_frame(
    result: SimulationResult, axis: Axis = "rho", discard: float = 0.0, samples_per_pi: int | None = None
) -> pd.DataFrame:
    """Samples with phi >= phi0 + discard; zeta is reduced to [-pi, pi) for plotting."""
    phis = result.phi_grid(samples_per_pi)
    phis = phis[phis >= result.phi0 + discard]
    if phis.size == 0:
        raise InvalidRegime(f"discarding {discard} leaves no samples (run ends at phi={result.phi_end})")
    states = result.reduced_states(phis)
    radial = np.exp(states[:, 0]) if axis == "rho" else states[:, 0]
    zeta = np.remainder(states[:, 1] + np.pi, 2 * np.pi) - np.pi
    return pd.DataFrame({"phi": phis, axis: radial, "zeta": zeta})


def equilibrium_marker(result: SimulationResult, axis: Axis) -> tuple[float, float] | None:
    sc = result.scenario
    if not sc.geometry.circular or not 0 < sc.n <= 1:
        return None
    try:
        rho_star, zeta_star = analysis.equilibrium_circular(sc.a, sc.n)
    except (NoEquilibrium, InvalidRegime) as e:
        logger.warning(f"No equilibrium marker: {e}")
        return None
    if axis == "mu":
        # n = 1 puts the equilibrium at rho = 0, off the log axis
        return None if rho_star == 0 else (float(np.log(rho_star)), zeta_star)
    return rho_star, zeta_star


def write_portrait(
    result: SimulationResult,
    output_dir: str | Path,
    stem: str = "portrait",
    axis: Axis = "rho",
    discard: float = 0.0,
) -> tuple[Path, Path]:
    """Writes <stem>.csv and <stem>.svg; returns both paths."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    frame = portrait_frame(result, axis, discard)
    data_path = output_dir / f"{stem}.csv"
    frame.to_csv(data_path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")

    sc = result.scenario
    svg_path = output_dir / f"{stem}.svg"
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 5))
        # a jump of 2pi in wrapped zeta is not motion; break the polyline there
        zeta = frame["zeta"].to_numpy()
        breaks = np.flatnonzero(np.abs(np.diff(zeta)) > np.pi) + 1
        for segment in np.split(np.arange(len(frame)), breaks):
            ax.plot(frame[axis].to_numpy()[segment], zeta[segment], color="tab:blue", linewidth=1.0)
        ax.plot(frame[axis].iloc[0], zeta[0], "o", color="tab:green", label="start")

        marker = equilibrium_marker(result, axis)
        if marker is not None:
            ax.plot(*marker, "o", color="tab:orange", markersize=8, label="equilibrium")

        ax.set_xlabel(r"$\rho$" if axis == "rho" else r"$\mu = \log\rho$")
        ax.set_ylabel(r"$\zeta$")
        ax.set_ylim(-np.pi, np.pi)
        ax.set_title(f"a={sc.a:g}, b={sc.b:g}, n={sc.n:g} ({result.outcome.kind})")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)

    logger.info(f"Wrote phase portrait ({len(frame)} samples) to {svg_path}")
    return data_path, svg_path


def write_plane_plot(result: SimulationResult, output_dir: str | Path, stem: str = "plane") -> Path:
    """
    Pursuer and evader paths in the (x, y) plane. For n < 1 the evader's curve scaled
    by n is drawn as the reference the circular pursuer converges to.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    frame = trajectory_frame(result)
    sc = result.scenario
    outline = np.linspace(0.0, 2 * np.pi, 721)
    X, Y = sc.a * np.cos(outline), sc.b * np.sin(outline)

    svg_path = output_dir / f"{stem}.svg"
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        ax.plot(X, Y, color="tab:green", linewidth=0.8, alpha=0.5)
        ax.plot(frame["X"], frame["Y"], color="tab:green", linewidth=1.2, label="evader")
        ax.plot(frame["x"], frame["y"], color="tab:red", linewidth=1.2, label="pursuer")
        if sc.n < 1:
            ax.plot(sc.n * X, sc.n * Y, "--", color="tab:blue", linewidth=1.0, label=f"evader curve scaled by n={sc.n:g}")
        ax.plot(frame["x"].iloc[0], frame["y"].iloc[0], "o", color="tab:red")
        ax.plot(frame["X"].iloc[0], frame["Y"].iloc[0], "o", color="tab:green")
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(f"a={sc.a:g}, b={sc.b:g}, n={sc.n:g} ({result.outcome.kind})")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)

    logger.info(f"Wrote trajectory plot ({len(frame)} samples) to {svg_path}")
    return svg_path
