"""
Time integration of the nutrient-prey-predator system and the qualitative
checks run on its trajectories.

    N' = (mu - N) D - P f1(N)
    P' = gamma1 P f1(N) - D1 P - Z f2(P)
    Z' = gamma2 Z f2(P) - D2 Z

Integration uses scipy's Dormand-Prince 5(4) pair (``RK45``) driven one step
at a time, with dense output sampled on a fixed grid.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import auto

import numpy as np
from scipy.integrate import RK45, quad

from .equilibria import lambda_p, lambda_z, mu_c1, single_species
from .errors import ContractViolationError, DomainError, ModelViolationError, StiffnessError
from .helpers import StrAutoEnum
from .responses import Parameters

logger = logging.getLogger(__name__)

NEGATIVE_FLOOR = -1e-9
ENVELOPE_SLACK = 1e-6
PLANE_TOL = 1e-9
ERROR_NORM_FLOOR = 0.1


class MonitoredRK45(RK45):
    """``RK45`` that records attempted and rejected steps and the largest accepted error norm."""

    def __init__(self, fun, t0, y0, t_bound, **options):
        super().__init__(fun, t0, y0, t_bound, **options)
        self.attempts = 0
        self.rejected = 0
        self.max_error_norm = 0.0

    def _estimate_error_norm(self, K, h, scale):
        error_norm = super()._estimate_error_norm(K, h, scale)
        self.attempts += 1
        if error_norm < 1:
            self.max_error_norm = max(self.max_error_norm, float(error_norm))
        else:
            self.rejected += 1
        return error_norm


@dataclass(frozen=True)
class IntegratorStats:
    steps: int
    rejected: int
    max_error_norm: float
    nfev: int


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    params: Parameters
    stats: IntegratorStats
    rel_tol: float
    abs_tol: float

    @property
    def n(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def p(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def z(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def initial_state(self) -> np.ndarray:
        return self.states[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def total_mass(self) -> np.ndarray:
        """``U(t) = N + P / gamma1 + Z / (gamma1 gamma2)``."""
        g1, g2 = self.params.gamma1, self.params.gamma2
        return self.n + self.p / g1 + self.z / (g1 * g2)

    def envelope(self) -> float:
        """Upper bound on ``U(t)``: ``max(U(0), D mu / D_hat)``."""
        return max(float(self.total_mass()[0]), self.params.D * self.params.mu / self.params.d_hat)

    def tail(self, fraction: float) -> "Trajectory":
        """Samples after the first ``fraction`` of the time span."""
        if not 0 <= fraction < 1:
            raise ValueError(f"fraction must be in [0, 1), got {fraction!r}")
        t0 = self.times[0] + fraction * (self.times[-1] - self.times[0])
        keep = self.times >= t0
        return Trajectory(self.times[keep], self.states[keep], self.params, self.stats,
                          self.rel_tol, self.abs_tol)

    def error_estimate(self) -> float:
        """
        Heuristic global error of the final state, not a rigorous bound.

        Each accepted step has an error norm of at most
        ``stats.max_error_norm`` (<= 1) relative to the tolerance scale
        ``abs_tol + rel_tol |y|``. Taking the scale at the final magnitude
        and letting the local errors add up like a random walk over the
        accepted steps gives ``max_error_norm * scale * sqrt(steps)``. The
        norm is floored at ``ERROR_NORM_FLOOR``.
        """
        scale = self.abs_tol + self.rel_tol * float(np.max(np.abs(self.final_state)))
        norm = max(self.stats.max_error_norm, ERROR_NORM_FLOOR)
        return norm * scale * math.sqrt(max(self.stats.steps, 1))

    def rows(self) -> list[dict]:
        return [
            {"t": float(t), "N": float(s[0]), "P": float(s[1]), "Z": float(s[2])}
            for t, s in zip(self.times, self.states)
        ]


def vector_field(params: Parameters):
    """Right-hand side ``(t, y) -> y'``. Responses are evaluated at ``max(x, 0)``."""
    mu, D, D1, D2 = params.mu, params.D, params.D1, params.D2
    g1, g2, f1, f2 = params.gamma1, params.gamma2, params.f1, params.f2

    def rhs(t, y):
        n, p, z = y
        uptake = f1.eval(max(n, 0.0))
        grazing = f2.eval(max(p, 0.0))
        return np.array([
            (mu - n) * D - p * uptake,
            g1 * p * uptake - D1 * p - z * grazing,
            g2 * z * grazing - D2 * z,
        ])

    return rhs


def _sample_times(t_end: float, sample_dt: float) -> np.ndarray:
    count = max(int(round(t_end / sample_dt)), 1)
    return np.linspace(0.0, t_end, count + 1)


def _check_invariants(traj: Trajectory) -> None:
    lowest = float(traj.states.min())
    if lowest < NEGATIVE_FLOOR:
        k = int(np.argmin(traj.states.min(axis=1)))
        raise ModelViolationError(
            f"state {traj.states[k].tolist()} at t={traj.times[k]!r} is below the "
            f"nonnegativity floor; tighten the integrator tolerances"
        )
    np.clip(traj.states, 0.0, None, out=traj.states)

    mass = traj.total_mass()
    bound = traj.envelope() + ENVELOPE_SLACK
    if float(mass.max()) > bound:
        k = int(np.argmax(mass))
        raise ModelViolationError(
            f"U(t)={mass[k]!r} at t={traj.times[k]!r} exceeds its envelope {bound!r}"
        )


def integrate(
    params: Parameters,
    init: Sequence[float],
    t_end: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    sample_dt: float = 0.05,
) -> Trajectory:
    """
    Integrate from ``init`` over ``[0, t_end]`` and sample every ``sample_dt``.

    Raises:
        StiffnessError: The step size underflowed.
        ModelViolationError: A sample is negative beyond the floor or the total
            mass leaves its envelope.
    """
    y0 = np.asarray(init, dtype=float)
    if y0.shape != (3,):
        raise ValueError(f"init must be (N0, P0, Z0), got {init!r}")
    if np.any(y0 < 0) or not y0[0] > 0:
        raise DomainError(f"init needs N0 > 0 and P0, Z0 >= 0, got {y0.tolist()}")
    if not t_end > 0 or not sample_dt > 0:
        raise ValueError(f"t_end and sample_dt must be positive, got {t_end!r}, {sample_dt!r}")

    times = _sample_times(float(t_end), float(sample_dt))
    states = np.empty((len(times), 3))
    solver = MonitoredRK45(vector_field(params), 0.0, y0, float(t_end),
                           rtol=rel_tol, atol=abs_tol)
    k = 0
    steps = 0
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise StiffnessError(f"integration stopped at t={solver.t!r}: {message}")
        steps += 1
        dense = solver.dense_output()
        while k < len(times) and times[k] <= solver.t:
            states[k] = dense(times[k])
            k += 1
    states[k:] = solver.y

    stats = IntegratorStats(steps=steps, rejected=solver.rejected,
                            max_error_norm=solver.max_error_norm, nfev=solver.nfev)
    logger.debug("integrate: %d steps, %d rejected, %d evaluations",
                 stats.steps, stats.rejected, stats.nfev)
    traj = Trajectory(times, states, params, stats, rel_tol, abs_tol)
    _check_invariants(traj)
    return traj


@dataclass(frozen=True)
class DescentReport:
    values: np.ndarray
    max_increase: float
    tolerance: float

    @property
    def non_increasing(self) -> bool:
        return self.max_increase <= self.tolerance


def _descent(values: np.ndarray, tolerance: float) -> DescentReport:
    increase = float(np.max(np.diff(values), initial=0.0))
    return DescentReport(values=values, max_increase=max(increase, 0.0), tolerance=tolerance)


def lyapunov_monitor_e0(traj: Trajectory, tolerance: float = 1e-8) -> DescentReport:
    """Track ``(mu - N)^2 / 2 + Z^2 / 2`` on a trajectory in the plane ``P = 0``."""
    if float(np.max(np.abs(traj.p))) > PLANE_TOL:
        raise ContractViolationError("lyapunov_monitor_e0 needs a trajectory with P = 0")
    values = 0.5 * (traj.params.mu - traj.n) ** 2 + 0.5 * traj.z**2
    return _descent(values, tolerance)


def hsu_function(params: Parameters, n: float, p: float) -> float:
    """
    Lyapunov function for the prey-only equilibrium in the plane ``Z = 0``:
    the integral of ``(f1(s) - f1(lambda_P)) / f1(s)`` from ``lambda_P`` to ``N``
    plus ``(P - P* - P* ln(P / P*)) / gamma1``.
    """
    if not p > 0:
        raise DomainError(f"Hsu function needs P > 0, got {p!r}")
    if not n > 0:
        raise DomainError(f"Hsu function needs N > 0, got {n!r}")
    point = single_species(params)
    if point is None:
        raise DomainError(f"prey-only equilibrium does not exist at mu={params.mu!r}")
    lp, prey, _ = point
    f1, level = params.f1, params.f1.eval(lp)
    integral, _ = quad(lambda s: (f1.eval(s) - level) / f1.eval(s), lp, n,
                       epsabs=1e-13, epsrel=1e-11)
    return integral + (p - prey - prey * math.log(p / prey)) / params.gamma1


def hsu_derivative(params: Parameters, n: float) -> float:
    """
    Time derivative of ``hsu_function`` on ``Z = 0`` in factored form. It does
    not depend on ``P`` and is negative for every ``N != lambda_P``.
    """
    lp = lambda_p(params)
    level = params.f1.eval(lp)
    f1_n = params.f1.eval(n)
    excess = params.mu - lp
    return (
        (f1_n - level)
        * ((params.mu - n) / excess - f1_n / level)
        * excess * params.D / f1_n
    )


def lyapunov_monitor_e1(traj: Trajectory, tolerance: float = 1e-7) -> DescentReport:
    """Track the Hsu function on a trajectory in the plane ``Z = 0``."""
    if float(np.max(np.abs(traj.z))) > PLANE_TOL:
        raise ContractViolationError("lyapunov_monitor_e1 needs a trajectory with Z = 0")
    values = np.array([hsu_function(traj.params, float(n), float(p))
                       for n, p in zip(traj.n, traj.p)])
    return _descent(values, tolerance)


class CycleKind(StrAutoEnum):
    EQUILIBRIUM = auto()
    LIMIT_CYCLE = auto()
    UNDETERMINED = auto()


@dataclass(frozen=True)
class CycleReport:
    classification: CycleKind
    amplitude: float
    period: float | None = None
    spread: float | None = None
    crossings: int = 0


def upward_crossings(times: np.ndarray, values: np.ndarray, level: float) -> np.ndarray:
    """Times where ``values`` crosses ``level`` upwards, by linear interpolation."""
    below = values[:-1] < level
    above = values[1:] >= level
    idx = np.nonzero(below & above)[0]
    frac = (level - values[idx]) / (values[idx + 1] - values[idx])
    return times[idx] + frac * (times[idx + 1] - times[idx])


def _relative_spread(values: np.ndarray) -> float:
    mean = float(np.mean(values))
    return float(np.ptp(values)) / abs(mean) if mean != 0 else math.inf


def detect_cycle(
    traj: Trajectory,
    params: Parameters | None = None,
    transient_fraction: float = 0.5,
    min_crossings: int = 4,
    amp_floor: float = 1e-3,
    spread_tol: float = 1e-3,
    window: int = 5,
) -> CycleReport:
    """
    Classify the attractor from the tail of ``traj`` using upward crossings of
    the section ``P = lambda_Z(D2)``, which passes through ``E2``.
    """
    params = traj.params if params is None else params
    tail = traj.tail(transient_fraction)
    amplitude = float(np.ptp(tail.p))
    if amplitude < amp_floor:
        return CycleReport(CycleKind.EQUILIBRIUM, amplitude)

    hits = upward_crossings(tail.times, tail.p, lambda_z(params))
    if len(hits) < min_crossings:
        return CycleReport(CycleKind.UNDETERMINED, amplitude, crossings=len(hits))

    periods = np.diff(hits)[-window:]
    amplitudes = np.array([
        np.ptp(tail.p[(tail.times >= start) & (tail.times <= stop)])
        for start, stop in zip(hits[:-1], hits[1:])
    ])[-window:]
    spread = max(_relative_spread(periods), _relative_spread(amplitudes))
    period = float(np.mean(periods))
    if traj.times[-1] - traj.times[0] < 50 * period:
        logger.warning("Trajectory spans fewer than 50 periods (period %.4g)", period)
    kind = CycleKind.LIMIT_CYCLE if spread < spread_tol else CycleKind.UNDETERMINED
    return CycleReport(kind, float(np.mean(amplitudes)), period, spread, len(hits))


@dataclass(frozen=True)
class PersistenceReport:
    skipped: bool
    reason: str = ""
    min_n: float | None = None
    min_p: float | None = None
    min_z: float | None = None
    floor: float = 1e-6

    @property
    def persistent(self) -> bool | None:
        if self.skipped:
            return None
        return min(self.min_n, self.min_p, self.min_z) > self.floor


def persistence_check(traj: Trajectory, floor: float = 1e-6) -> PersistenceReport:
    """Smallest N, P and Z over the trailing half; skipped unless P0, Z0 > 0 and mu > mu_c1."""
    _, p0, z0 = traj.initial_state
    reason = ""
    if not (p0 > 0 and z0 > 0):
        reason = "needs P0 > 0 and Z0 > 0"
    elif not traj.params.mu > mu_c1(traj.params):
        reason = "needs mu > mu_c1"
    if reason:
        logger.warning("persistence check skipped: %s", reason)
        return PersistenceReport(skipped=True, reason=reason, floor=floor)
    tail = traj.tail(0.5)
    return PersistenceReport(
        skipped=False,
        min_n=float(tail.n.min()),
        min_p=float(tail.p.min()),
        min_z=float(tail.z.min()),
        floor=floor,
    )
