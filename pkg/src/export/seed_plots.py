"""
Convergence of several initial conditions onto the periodic orbit: mu(phi) and zeta(phi)
per seed, and the pursuer paths over the last revolution.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from src.core import analysis, dynamics, geometry  # noqa: E402
from src.shared import constants  # noqa: E402
from src.shared.config import settings  # noqa: E402
from src.shared.logger import get_logger  # noqa: E402
from src.shared.models import EllipseGeometry, IntegratorConfig, LogPolarState, PolarState  # noqa: E402

logger = get_logger(__name__)

_SVG_RC = {"svg.hashsalt": "pursuit-seeds", "svg.fonttype": "path"}
SEED_COLORS = ("tab:red", "tab:blue", "tab:green", "tab:purple", "tab:orange", "tab:brown")


def seed_frame(
    g: EllipseGeometry,
    n: float,
    phi0: float,
    seeds: list[LogPolarState],
    span: float,
    samples_per_pi: int | None = None,
    cfg: IntegratorConfig | None = None,
) -> pd.DataFrame:
    """
    Long table with one row per (seed, phi). zeta keeps its winding; zeta_aligned removes
    each seed's final 2pi offset against the first seed so the limits can be overlaid.
    """
    density = samples_per_pi or settings.SAMPLES_PER_PI
    periods = max(1, math.ceil(span / math.pi))
    phis = np.linspace(phi0, phi0 + span, periods * density + 1)
    trajectories = analysis.seed_trajectories(g, n, phi0, seeds, phi0 + span, cfg)
    offsets = analysis.winding_offsets([float(t.final_state[1]) for t in trajectories])

    rows = []
    for k, (traj, offset) in enumerate(zip(trajectories, offsets, strict=True), start=1):
        states = traj.sample(phis)
        mu, zeta = states[:, 0], states[:, 1]
        pursuer = np.array(
            [dynamics.reconstruct_pursuer(PolarState(rho=math.exp(m), zeta=z), p, g) for m, z, p in zip(mu, zeta, phis, strict=True)]
        )
        rows.append(
            pd.DataFrame(
                {
                    "seed": k,
                    "phi": phis,
                    "mu": mu,
                    "zeta": zeta,
                    "zeta_aligned": zeta - 2 * math.pi * offset,
                    "winding_offset": offset,
                    "x": pursuer[:, 0],
                    "y": pursuer[:, 1],
                }
            )
        )
    return pd.concat(rows, ignore_index=True)


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def write_seed_plots(
    frame: pd.DataFrame, g: EllipseGeometry, n: float, output_dir: str | Path, stem: str = "seeds"
) -> tuple[Path, Path, Path]:
    """Writes <stem>.csv, <stem>.svg (mu and zeta against phi) and <stem>.plane.svg; returns the paths."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    data_path = output_dir / f"{stem}.csv"
    frame.to_csv(data_path, index=False, float_format=constants.CSV_FLOAT_FORMAT, lineterminator="\n")

    groups = list(frame.groupby("seed", sort=True))
    curves_path = output_dir / f"{stem}.svg"
    with plt.rc_context(_SVG_RC):
        fig, (ax_mu, ax_zeta) = plt.subplots(2, 1, figsize=(8, 7), sharex=True)
        for (seed, rows), color in zip(groups, SEED_COLORS, strict=False):
            ax_mu.plot(rows["phi"], rows["mu"], color=color, linewidth=1.0, label=f"pursuer {seed}")
            ax_zeta.plot(rows["phi"], rows["zeta"], color=color, linewidth=1.0, label=f"pursuer {seed}")
            offset = int(rows["winding_offset"].iloc[0])
            if offset:
                ax_zeta.plot(
                    rows["phi"], rows["zeta_aligned"], "--", color=color, linewidth=1.0, label=f"pursuer {seed} {-offset:+d}x2pi"
                )
        ax_mu.set_ylabel(r"$\mu$")
        ax_zeta.set_ylabel(r"$\zeta$")
        ax_zeta.set_xlabel(r"$\varphi$")
        ax_mu.set_title(f"a={g.a:g}, b={g.b:g}, n={n:g}")
        for ax in (ax_mu, ax_zeta):
            ax.grid(True, alpha=0.3)
            ax.legend(loc="best", fontsize="small")
        _save(fig, curves_path)

    # last revolution of the evader: phi advances by 2pi per lap
    last_lap = frame["phi"] >= frame["phi"].max() - 2 * math.pi
    outline = np.linspace(0.0, 2 * math.pi, 721)
    X, Y = geometry.evader_position(g, outline)
    plane_path = output_dir / f"{stem}.plane.svg"
    with plt.rc_context(_SVG_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        ax.plot(X, Y, color="tab:gray", linewidth=1.0, label="evader")
        for (seed, rows), color in zip(frame[last_lap].groupby("seed", sort=True), SEED_COLORS, strict=False):
            ax.plot(rows["x"], rows["y"], color=color, linewidth=1.0, label=f"pursuer {seed}")
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best", fontsize="small")
        _save(fig, plane_path)

    logger.info(f"Wrote seed convergence plots for {len(groups)} seeds to {output_dir}")
    return data_path, curves_path, plane_path
