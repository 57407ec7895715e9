from pathlib import Path

import numpy as np
import pandas as pd

from src.core import geometry
from src.core.simulation import SimulationResult, pursuer_positions
from src.shared.constants import CSV_COLUMNS, CSV_FLOAT_FORMAT
from src.shared.logger import get_logger

logger = get_logger(__name__)


def trajectory_frame(result: SimulationResult, samples_per_pi: int | None = None) -> pd.DataFrame:
    """
    One row per phi on the fixed grid merged with the accepted steps.
    t comes from t_of_phi, (x, y) from the reduced state, (X, Y) from the ellipse.
    """
    g = result.scenario.geometry
    phis = result.phi_grid(samples_per_pi)
    states = result.reduced_states(phis)
    mu, zeta = states[:, 0], states[:, 1]
    pursuer = pursuer_positions(result, phis)
    X, Y = geometry.evader_position(g, phis)

    frame = pd.DataFrame(
        {
            "phi": phis,
            "t": geometry.t_of_phi_grid(g, result.phi0, phis),
            "mu": mu,
            "zeta": zeta,
            "rho": np.exp(mu),
            "x": pursuer[:, 0],
            "y": pursuer[:, 1],
            "X": X,
            "Y": Y,
        }
    )
    return frame[CSV_COLUMNS]


def write_trajectory_csv(result: SimulationResult, output_path: str | Path, samples_per_pi: int | None = None) -> Path:
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    frame = trajectory_frame(result, samples_per_pi)
    # 17 significant digits, fixed line endings: same scenario, same bytes
    frame.to_csv(output_path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} trajectory rows to {output_path}")
    return output_path
