"""
Runs a Scenario in the requested formulation and exposes the result in the common
(phi, mu, zeta) frame, whatever variable the solver actually integrated in.
"""

import math
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core import analysis, dynamics, geometry
from src.core.exceptions import InvalidRegime, NoEquilibrium
from src.core.integrate import Outcome, SeparationSensor, Trajectory, integrate
from src.shared.config import settings
from src.shared.logger import get_logger
from src.shared.models import CartesianPair, Formulation, OutcomeKind, PolarState, RunRecord, Scenario

logger = get_logger(__name__)

TWO_PI = 2 * math.pi


def _nearest_branch(raw: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Shift each raw angle by a multiple of 2pi onto the branch closest to reference."""
    return reference + np.remainder(raw - reference + math.pi, TWO_PI) - math.pi


class SimulationResult(BaseModel):
    """
    One integrated scenario. The outcome's s values are tangent angles phi, regardless of
    the formulation's own independent variable.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    scenario: Scenario
    outcome: Outcome
    native: Trajectory = Field(..., description="Trajectory in the formulation's own variables")
    phi_steps: np.ndarray = Field(..., description="Accepted solver steps mapped to phi")
    sampler: Callable[[np.ndarray], np.ndarray] = Field(..., description="phi grid -> (m, 2) array of (mu, zeta)")

    @property
    def phi0(self) -> float:
        return self.scenario.phi0

    @property
    def phi_end(self) -> float:
        if self.outcome.captured:
            return self.outcome.s_crossing
        return self.outcome.s_end

    def phi_grid(self, samples_per_pi: int | None = None) -> np.ndarray:
        """Fixed grid phi0 + k*pi/N up to phi_end, merged with every accepted step."""
        per_pi = samples_per_pi or settings.SAMPLES_PER_PI
        k_max = math.floor((self.phi_end - self.phi0) * per_pi / math.pi + 1e-9)
        fixed = self.phi0 + np.arange(k_max + 1) * math.pi / per_pi
        steps = self.phi_steps[self.phi_steps <= self.phi_end]
        grid = np.unique(np.concatenate((fixed, steps, [self.phi_end])))
        return grid[(grid >= self.phi0) & (grid <= self.phi_end)]

    def reduced_states(self, phis) -> np.ndarray:
        """(mu, zeta) at each phi; zeta is continuous and starts on the scenario's zeta0 branch."""
        return self.sampler(np.atleast_1d(np.asarray(phis, dtype=float)))


class SimulationRunner:
    """
    Dispatches a scenario to its formulation. Every formulation integrates the same
    physical system; they differ in the independent variable and in the state encoding.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.g = scenario.geometry
        self.cfg = scenario.integrator
        self.phi1 = scenario.phi0 + scenario.span

    def run(self) -> SimulationResult:
        sc = self.scenario
        logger.info(
            f"Running {sc.formulation} scenario a={sc.a} b={sc.b} n={sc.n} "
            f"mu0={sc.initial_mu:.6g} zeta0={sc.zeta0:.6g} over phi in [{sc.phi0:.6g}, {self.phi1:.6g}]"
        )
        runners = {
            Formulation.LOGPOLAR_PHI: self._run_logpolar_phi,
            Formulation.POLAR_PHI: self._run_polar_phi,
            Formulation.COMPLEX_PHI: self._run_complex_phi,
            Formulation.POLAR_T: self._run_polar_t,
            Formulation.CARTESIAN: self._run_cartesian,
        }
        result = runners[sc.formulation]()
        out = result.outcome
        if out.captured:
            logger.info(f"Captured: phi_B={out.s_blowup:.10g} (threshold crossed at phi={out.s_crossing:.10g})")
        elif out.kind == OutcomeKind.FAILED:
            logger.warning(f"Run failed at phi={out.s_end:.6g}: {out.diagnostic}")
        else:
            logger.info(f"Completed without capture at phi={out.s_end:.6g}")
        return result

    # --- formulations ---

    def _phi_outcome(self, native: Outcome, to_phi: Callable[[float], float], final_state: np.ndarray) -> Outcome:
        return Outcome(
            kind=native.kind,
            final_state=final_state,
            s_end=to_phi(native.s_end),
            s_crossing=to_phi(native.s_crossing) if native.s_crossing is not None else None,
            s_blowup=to_phi(native.s_blowup) if native.s_blowup is not None else None,
            diagnostic=native.diagnostic,
        )

    def _finish(self, traj: Trajectory, native: Outcome, to_phi, phi_steps, sampler) -> SimulationResult:
        outcome = self._phi_outcome(native, to_phi, np.zeros(2))
        provisional = SimulationResult(
            scenario=self.scenario, outcome=outcome, native=traj, phi_steps=phi_steps, sampler=sampler
        )
        final = provisional.reduced_states([provisional.phi_end])[0]
        return provisional.model_copy(update={"outcome": outcome.model_copy(update={"final_state": final})})

    def _run_logpolar_phi(self) -> SimulationResult:
        sc = self.scenario
        traj, native = integrate(
            dynamics.logpolar_phi_field(self.g, sc.n),
            np.array([sc.initial_mu, sc.zeta0]),
            (sc.phi0, self.phi1),
            self.cfg,
            sensor=analysis.LOG_SENSOR,
        )
        return self._finish(traj, native, lambda s: s, traj.s.copy(), traj.sample)

    def _run_polar_phi(self) -> SimulationResult:
        sc = self.scenario
        traj, native = integrate(
            dynamics.polar_phi_field(self.g, sc.n),
            np.array([math.exp(sc.initial_mu), sc.zeta0]),
            (sc.phi0, self.phi1),
            self.cfg,
            sensor=SeparationSensor(index=0, encoding="linear"),
        )

        def sampler(phis: np.ndarray) -> np.ndarray:
            states = traj.sample(phis)
            return np.column_stack((np.log(states[:, 0]), states[:, 1]))

        return self._finish(traj, native, lambda s: s, traj.s.copy(), sampler)

    def _run_complex_phi(self) -> SimulationResult:
        sc = self.scenario
        z0 = dynamics.to_complex(sc.initial_state).z
        traj, native = integrate(
            dynamics.complex_phi_field(self.g, sc.n),
            np.array([z0], dtype=complex),
            (sc.phi0, self.phi1),
            self.cfg,
            sensor=analysis.MODULUS_SENSOR,
        )
        # zeta has no branch in z; carry it by unwrapping arg z along the accepted steps
        step_zeta = np.unwrap(np.angle(traj.states[:, 0]))
        step_zeta += TWO_PI * round((sc.zeta0 - step_zeta[0]) / TWO_PI)

        def sampler(phis: np.ndarray) -> np.ndarray:
            z = traj.sample(phis)[:, 0]
            reference = np.interp(phis, traj.s, step_zeta)
            return np.column_stack((np.log(np.abs(z)), _nearest_branch(np.angle(z), reference)))

        return self._finish(traj, native, lambda s: s, traj.s.copy(), sampler)

    def _run_polar_t(self) -> SimulationResult:
        sc = self.scenario
        if not self.g.circular:
            raise InvalidRegime("polar-t formulation needs a circular evader")
        a = self.g.a
        traj, native = integrate(
            dynamics.polar_t_field(a, sc.n),
            np.array([math.exp(sc.initial_mu), sc.zeta0]),
            (0.0, a * sc.span),
            self.cfg,
            sensor=SeparationSensor(index=0, encoding="linear"),
        )

        def to_phi(t: float) -> float:
            return sc.phi0 + t / a

        def sampler(phis: np.ndarray) -> np.ndarray:
            states = traj.sample(a * (phis - sc.phi0))
            return np.column_stack((np.log(states[:, 0]), states[:, 1]))

        return self._finish(traj, native, to_phi, sc.phi0 + traj.s / a, sampler)

    def _run_cartesian(self) -> SimulationResult:
        """Pursuer position plus the evader's tangent angle, integrated in unit-speed time."""
        sc = self.scenario
        g = self.g
        start = dynamics.reconstruct_pursuer(dynamics.logpolar_to_polar(sc.initial_state), sc.phi0, g)

        def separation(t: float, y: np.ndarray) -> float:
            X, Y = geometry.evader_position(g, y[2])
            return math.hypot(X - y[0], Y - y[1])

        traj, native = integrate(
            dynamics.cartesian_unit_speed_field(g, sc.n),
            np.array([start[0], start[1], sc.phi0]),
            (0.0, geometry.t_of_phi(g, sc.phi0, self.phi1)),
            self.cfg,
            sensor=SeparationSensor(encoding="custom", separation_fn=separation),
        )
        step_phi = traj.states[:, 2]

        def reduce(states: np.ndarray) -> np.ndarray:
            X, Y = geometry.evader_position(g, states[:, 2])
            dx, dy = X - states[:, 0], Y - states[:, 1]
            return np.column_stack((0.5 * np.log(dx**2 + dy**2), states[:, 2] - np.arctan2(dy, dx)))

        step_zeta = np.unwrap(reduce(traj.states)[:, 1])
        step_zeta += TWO_PI * round((sc.zeta0 - step_zeta[0]) / TWO_PI)

        def sampler(phis: np.ndarray) -> np.ndarray:
            times = geometry.t_of_phi_grid(g, sc.phi0, phis)
            times = np.clip(times, *traj.span)
            reduced = reduce(traj.sample(times))
            reduced[:, 1] = _nearest_branch(reduced[:, 1], np.interp(phis, step_phi, step_zeta))
            return reduced

        def to_phi(t: float) -> float:
            t_last = traj.span[1]
            if t <= t_last:
                return float(traj.sample(t)[0, 2])
            # extrapolated blow-up lies past the last step; continue phi at its final rate
            phi_last = float(traj.final_state[2])
            return phi_last + float(geometry.angular_rate(g, phi_last)) * (t - t_last)

        return self._finish(traj, native, to_phi, step_phi.copy(), sampler)


def run_scenario(scenario: Scenario) -> SimulationResult:
    return SimulationRunner(scenario).run()


def pursuer_positions(result: SimulationResult, phis) -> np.ndarray:
    """Pursuer (x, y) at each phi, rebuilt from the reduced state."""
    g = result.scenario.geometry
    states = result.reduced_states(phis)
    return np.array(
        [
            dynamics.reconstruct_pursuer(PolarState(rho=math.exp(mu), zeta=zeta), phi, g)
            for phi, (mu, zeta) in zip(np.atleast_1d(phis), states, strict=True)
        ]
    )


def initial_pair(scenario: Scenario) -> CartesianPair:
    g = scenario.geometry
    pursuer = dynamics.reconstruct_pursuer(dynamics.logpolar_to_polar(scenario.initial_state), scenario.phi0, g)
    X, Y = geometry.evader_position(g, scenario.phi0)
    return CartesianPair(evader=(float(X), float(Y)), pursuer=pursuer)


def build_run_record(result: SimulationResult, digest: str, trajectory_path: str | None = None) -> RunRecord:
    """Outcome, capture data and every analytic bound that applies to the scenario's regime."""
    sc = result.scenario
    g = sc.geometry
    mu_end, zeta_end = result.outcome.final_state
    bounds: dict[str, float] = {"blowup_lower_bound": analysis.blowup_lower_bound(g, sc.n, sc.initial_mu)}
    if sc.n > 1:
        bounds["blowup_upper_bound"] = analysis.blowup_upper_bound(g, sc.n, sc.initial_mu, sc.phi0) - sc.phi0
        bounds["guaranteed_upper_bound"] = analysis.guaranteed_upper_bound(g, sc.n, sc.initial_mu, sc.phi0) - sc.phi0

    capture = None
    if result.outcome.captured or sc.n > 1:
        capture = analysis.capture_report(g, sc.n, sc.initial_mu, sc.phi0, result.outcome)

    equilibrium = None
    if g.circular and sc.n <= 1:
        try:
            bounds["limit_circle_radius"] = analysis.limit_circle_radius(g.a, sc.n)
            if sc.n < 1:
                equilibrium = analysis.equilibrium_report(g.a, sc.n)
        except (NoEquilibrium, InvalidRegime) as e:
            logger.warning(f"Equilibrium analysis skipped: {e}")

    if sc.n < 1:
        annulus = analysis.annulus_bounds(initial_pair(sc).pursuer, g)
        bounds["annulus_R0"] = annulus.R0
        bounds["annulus_N_prime"] = annulus.N_prime

    return RunRecord(
        digest=digest,
        scenario=sc.model_dump(mode="json"),
        trajectory_path=trajectory_path,
        outcome=result.outcome.kind,
        diagnostic=result.outcome.diagnostic,
        phi_end=result.phi_end,
        final_state={"mu": float(mu_end), "zeta": float(zeta_end), "rho": math.exp(float(mu_end))},
        capture=capture,
        equilibrium=equilibrium,
        bounds=bounds,
    )
