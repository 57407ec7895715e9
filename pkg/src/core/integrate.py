"""
Adaptive integration over a scalar independent variable with dense output and
capture-event localization, on top of scipy's Dormand-Prince 5(4) pair.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import optimize
from scipy.integrate import solve_ivp

from src.core.exceptions import OutOfSpan, PursuitError
from src.shared import constants
from src.shared.logger import get_logger
from src.shared.models import IntegratorConfig, OutcomeKind

logger = get_logger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SeparationSensor:
    """
    Reads the pursuer-evader separation out of a state vector.

    encoding:
      "log"      y[index] is mu = log rho
      "linear"   y[index] is rho
      "modulus"  y[index] is z, rho = |z|
      "custom"   separation_fn(s, y) returns rho
    """

    index: int = 0
    encoding: Literal["log", "linear", "modulus", "custom"] = "log"
    separation_fn: Callable[[float, np.ndarray], float] | None = None

    def separation(self, s: float, y: np.ndarray) -> float:
        if self.encoding == "log":
            return math.exp(float(np.real(y[self.index])))
        if self.encoding == "linear":
            return float(np.real(y[self.index]))
        if self.encoding == "modulus":
            return float(abs(y[self.index]))
        return float(self.separation_fn(s, y))

    def gap(self, s: float, y: np.ndarray, mu_min: float) -> float:
        """Signed distance to the capture threshold; crosses zero downward at capture."""
        if self.encoding == "log":
            return float(np.real(y[self.index])) - mu_min
        return self.separation(s, y) - math.exp(mu_min)


class Trajectory:
    """Accepted integrator steps plus the solver's piecewise interpolant."""

    def __init__(self, s: np.ndarray, states: np.ndarray, interpolant=None):
        s = np.asarray(s, dtype=float)
        states = np.asarray(states)
        if states.ndim == 1:
            states = states.reshape(-1, 1)
        keep = np.concatenate(([True], np.diff(s) > 0))
        self.s = s[keep]
        self.states = states[keep]
        self._interpolant = interpolant

    @property
    def span(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.s)

    def sample(self, grid) -> np.ndarray:
        """Dense evaluation on a grid, shape (len(grid), dim); nodes are returned verbatim."""
        grid = np.atleast_1d(np.asarray(grid, dtype=float))
        lo, hi = self.span
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if grid.size and (grid.min() < lo - slack or grid.max() > hi + slack):
            raise OutOfSpan(f"requested [{grid.min()}, {grid.max()}] outside trajectory span [{lo}, {hi}]")
        grid = np.clip(grid, lo, hi)
        if self._interpolant is None:
            if len(self.s) == 1 and np.all(grid == lo):
                return np.repeat(self.states[:1], grid.size, axis=0)
            raise OutOfSpan("trajectory has no dense output")
        values = np.asarray(self._interpolant(grid)).T.reshape(grid.size, -1).astype(self.states.dtype)
        idx = np.clip(np.searchsorted(self.s, grid), 0, len(self.s) - 1)
        exact = self.s[idx] == grid
        values[exact] = self.states[idx[exact]]
        return values


class Outcome(BaseModel):
    """First terminal event of a run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: OutcomeKind
    final_state: np.ndarray | None = None
    s_end: float | None = None
    s_crossing: float | None = None
    s_blowup: float | None = None
    diagnostic: str | None = None

    @property
    def captured(self) -> bool:
        return self.kind == OutcomeKind.CAPTURED


def integrate(
    rhs: VectorField,
    initial,
    span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
    sensor: SeparationSensor | None = None,
) -> tuple[Trajectory, Outcome]:
    """
    Integrates rhs from span[0] to span[1]. With a sensor, a terminal event stops the run
    when mu falls to cfg.mu_min and the outcome carries the refined crossing and the
    extrapolated blow-up value.
    """
    cfg = cfg or IntegratorConfig()
    s0, s1 = float(span[0]), float(span[1])
    if not s1 > s0:
        raise ValueError(f"integration span must satisfy s1 > s0, got ({s0}, {s1})")
    y0 = np.atleast_1d(np.asarray(initial))

    events = None
    if sensor is not None:

        def capture_event(s, y):
            return sensor.gap(s, y, cfg.mu_min)

        capture_event.terminal = True
        capture_event.direction = -1
        events = [capture_event]

    logger.debug(f"Integrating over [{s0:.6g}, {s1:.6g}] with {cfg.method} (rtol={cfg.rel_tol}, atol={cfg.abs_tol})")
    try:
        sol = solve_ivp(
            rhs,
            (s0, s1),
            y0,
            method=cfg.method,
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            max_step=cfg.max_step,
            dense_output=True,
            events=events,
        )
    except (PursuitError, ZeroDivisionError, FloatingPointError, OverflowError) as e:
        logger.error(f"Right-hand side failed during integration: {e}")
        traj = Trajectory(np.array([s0]), y0.reshape(1, -1))
        return traj, Outcome(kind=OutcomeKind.FAILED, final_state=y0, s_end=s0, diagnostic=str(e))

    traj = Trajectory(sol.t, sol.y.T, sol.sol)

    if sol.status == -1:
        logger.warning(f"Integration failed at s={traj.span[1]:.6g}: {sol.message}")
        return traj, Outcome(
            kind=OutcomeKind.FAILED, final_state=traj.final_state, s_end=traj.span[1], diagnostic=sol.message
        )

    if sol.status == 1 and sensor is not None:
        s_crossing, s_blowup = detect_capture(traj, sensor, cfg)
        logger.info(f"Capture detected: mu crossed {cfg.mu_min} at s={s_crossing:.10g}, blow-up at s={s_blowup:.10g}")
        return traj, Outcome(
            kind=OutcomeKind.CAPTURED,
            final_state=traj.final_state,
            s_end=traj.span[1],
            s_crossing=s_crossing,
            s_blowup=s_blowup,
        )

    return traj, Outcome(kind=OutcomeKind.COMPLETED, final_state=traj.final_state, s_end=traj.span[1])


def detect_capture(traj: Trajectory, sensor: SeparationSensor, cfg: IntegratorConfig) -> tuple[float, float]:
    """
    Refines where mu = cfg.mu_min by bisection on the dense output, then extrapolates
    e^mu linearly to zero over the last accepted steps. Returns (crossing, blow-up).
    """

    def gap(s: float) -> float:
        return sensor.gap(s, traj.sample(s)[0], cfg.mu_min)

    s_hi = float(traj.s[-1])
    s_lo = float(traj.s[-2]) if len(traj) > 1 else s_hi
    if gap(s_hi) >= 0.0 or gap(s_lo) <= 0.0:
        # the solver's own root already sits on the threshold
        s_crossing = s_hi
    else:
        s_crossing = float(optimize.bisect(gap, s_lo, s_hi, xtol=cfg.event_tol))

    k = constants.CAPTURE_EXTRAPOLATION_POINTS
    tail_s = np.append(traj.s[-k - 1 : -1], s_crossing)
    tail_rho = np.array([sensor.separation(s, traj.sample(s)[0]) for s in tail_s])
    # fit against offsets from the crossing; raw s values differ only in the last digits
    slope, intercept = np.polyfit(tail_s - s_crossing, tail_rho, 1)
    s_blowup = s_crossing - float(intercept / slope) if slope < 0 else s_crossing
    # blow-up cannot precede the threshold crossing
    return s_crossing, max(s_blowup, s_crossing)


def dense_eval(traj: Trajectory, s: float) -> np.ndarray:
    """State at s; exact at accepted steps, interpolated in between."""
    return traj.sample(s)[0]
