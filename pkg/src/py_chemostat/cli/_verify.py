"""
Verification suites run by ``py-chemostat verify``.

Each check is registered with ``@check(name)`` and receives the run config.
A check returns ``(passed, detail)`` and raises ``SkipCheck`` when its
preconditions do not hold. A ``ChemostatError`` or a numeric
``ArithmeticError``/``ValueError`` raised by a check is reported as a failure.
"""

import dataclasses
import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np

from .. import dynamics, equilibria, hopf
from ..errors import ChemostatError
from ..helpers import NormalizedDict, registry_decorator
from ..responses import HollingII, Parameters
from ._config import RunConfig, parse_config, with_overrides

logger = logging.getLogger(__name__)

SHORT_HORIZON = 50.0
RANDOM_STARTS = 20
BRANCH_POINTS = 200

_CHECKS: NormalizedDict[str, Callable] = NormalizedDict()
check = registry_decorator(_CHECKS, "check_name")


class SkipCheck(Exception):
    pass


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    skipped: bool = False


def _integrate(config: RunConfig, params: Parameters, init, t_end: float,
               rel_tol: float | None = None) -> dynamics.Trajectory:
    return dynamics.integrate(
        params, init, t_end,
        rel_tol=config.options.rel_tol if rel_tol is None else rel_tol,
        abs_tol=config.options.abs_tol,
        sample_dt=config.options.sample_dt,
    )


@check("break_even_closed_form")
def _break_even(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    cases = [("lambda_P", params.f1, params.gamma1, params.D1),
             ("lambda_Z", params.f2, params.gamma2, params.D2)]
    worst = 0.0
    for _, response, gamma, removal in cases:
        if not isinstance(response, HollingII):
            raise SkipCheck("closed form only for holling2 responses")
        exact = response.alpha * removal / (gamma * response.m - removal)
        computed = equilibria.break_even(response, gamma, removal)
        worst = max(worst, abs(computed - exact) / exact)
    return worst <= 1e-12, f"max relative error {worst:.3g}"


@check("coexistence_nutrient_closed_form")
def _nutrient(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    if not isinstance(params.f1, HollingII):
        raise SkipCheck("closed form only for a holling2 prey response")
    if equilibria.coexistence(params) is None:
        raise SkipCheck(f"no coexistence equilibrium at mu={params.mu!r}")
    gap = abs(equilibria.coexistence_nutrient(params) - equilibria.holling2_nutrient(params))
    return gap <= 1e-10, f"|N - N_closed| = {gap:.3g}"


@check("branch_monotonicity")
def _monotone(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    threshold = equilibria.mu_c1(params)
    width = 10.0 * (threshold - equilibria.lambda_p(params))
    grid = np.linspace(threshold, threshold + width, BRANCH_POINTS + 1)[1:]
    points = [equilibria.coexistence(params.with_mu(float(mu))) for mu in grid]
    n = np.array([p.n for p in points])
    z = np.array([p.z for p in points])
    bound = equilibria.predator_bound(params)
    passed = bool(np.all(np.diff(n) > 0) and np.all(np.diff(z) > 0) and z.max() < bound)
    return passed, f"Z* max {z.max():.6g} < bound {bound:.6g}"


@check("trajectory_envelope")
def _envelope(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    rng = np.random.default_rng(config.options.seed)
    scale = max(params.mu, 1.0)
    for _ in range(RANDOM_STARTS):
        init = rng.uniform(0.01, 1.0, size=3) * scale
        # integrate raises ModelViolationError on a breach.
        _integrate(config, params, init, SHORT_HORIZON)
    return True, f"{RANDOM_STARTS} random starts within the nonnegativity floor and envelope"


@check("lyapunov_washout_plane")
def _lyapunov_e0(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    if not params.mu > 0:
        raise SkipCheck("needs mu > 0")
    rng = np.random.default_rng(config.options.seed)
    worst = 0.0
    for _ in range(RANDOM_STARTS):
        n0, z0 = rng.uniform(0.01, 2.0, size=2) * params.mu
        report = dynamics.lyapunov_monitor_e0(
            _integrate(config, params, (n0, 0.0, z0), SHORT_HORIZON)
        )
        worst = max(worst, report.max_increase)
    return worst <= 1e-8, f"largest increase {worst:.3g}"


@check("lyapunov_prey_plane")
def _lyapunov_e1(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    point = equilibria.single_species(params)
    if point is None:
        raise SkipCheck(f"no prey-only equilibrium at mu={params.mu!r}")
    rng = np.random.default_rng(config.options.seed)
    starts = [(point.n, 2.0 * point.p, 0.0)]
    starts += [(rng.uniform(0.1, 2.0) * params.mu, rng.uniform(0.1, 2.0) * point.p, 0.0)
               for _ in range(RANDOM_STARTS - 1)]
    worst = 0.0
    for init in starts:
        traj = _integrate(config, params, init, SHORT_HORIZON)
        worst = max(worst, dynamics.lyapunov_monitor_e1(traj).max_increase)
    return worst <= 1e-7, f"largest increase {worst:.3g}"


@check("plane_invariance")
def _planes(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    start = max(params.mu, 0.1)
    no_prey = _integrate(config, params, (start, 0.0, 0.5), SHORT_HORIZON)
    no_predator = _integrate(config, params, (start, 0.5, 0.0), SHORT_HORIZON)
    drift = max(float(np.abs(no_prey.p).max()), float(np.abs(no_predator.z).max()))
    return drift <= 1e-12, f"largest drift off the planes {drift:.3g}"


@check("step_halving")
def _halving(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    point = equilibria.coexistence(params)
    init = tuple(1.05 * v for v in point) if point else (max(params.mu, 0.1), 0.5, 0.5)
    coarse = _integrate(config, params, init, SHORT_HORIZON)
    fine = _integrate(config, params, init, SHORT_HORIZON, rel_tol=config.options.rel_tol / 10)
    change = float(np.max(np.abs(coarse.final_state - fine.final_state)))
    allowed = 10.0 * coarse.error_estimate()
    return change < allowed, f"terminal change {change:.3g} vs allowed {allowed:.3g}"


@check("appendix_bound")
def _perturbation_bound(config: RunConfig) -> tuple[bool, str]:
    params = config.parameters
    if not params.equal_removal:
        raise SkipCheck("needs D = D1 = D2")
    interval = config.options.mu_interval
    if interval is None:
        mu_c2 = hopf.locate_hopf(params, workers=config.options.workers).mu_c2
        interval = (mu_c2 - 0.05, mu_c2 + 0.05)
    report = hopf.appendix_bound_check(
        params, config.options.radii, config.options.samples_per_circle, interval,
        workers=config.options.workers,
    )
    ratios = ", ".join(f"{b.radius:g}: {b.max_ratio:.4g}" for b in report.bounds)
    return report.bounded(), f"max ratio per radius {{{ratios}}}, spread {report.spread:.3g}"


def _run_one(name: str, func: Callable, config: RunConfig) -> CheckResult:
    try:
        passed, detail = func(config)
    except SkipCheck as exc:
        logger.warning("check %s skipped: %s", name, exc)
        return CheckResult(name, True, str(exc), skipped=True)
    except (ChemostatError, ArithmeticError, ValueError) as exc:
        logger.error("check %s raised %s: %s", name, type(exc).__name__, exc)
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, bool(passed), detail)


def run_checks(document: dict[str, Any],
               overrides: dict[str, Any] | None = None) -> list[CheckResult]:
    """
    Build the config and run every registered check. A config that fails to
    build is reported as a failed ``parameters`` entry and nothing else runs.
    """
    try:
        config = with_overrides(parse_config(document), **(overrides or {}))
    except ChemostatError as exc:
        return [CheckResult("parameters", False, str(exc))]
    if config.mu_range is not None:
        logger.warning("verify runs at the low end of the mu range, mu=%r", config.parameters.mu)
        config = dataclasses.replace(config, mu_range=None)

    results = [CheckResult("parameters", True, "constructor invariants hold")]
    for name, func in _CHECKS.items():
        result = _run_one(name, func, config)
        logger.info("%s: %s", name, "skipped" if result.skipped else
                    ("pass" if result.passed else "FAIL"))
        results.append(result)
    return results


def all_passed(results: list[CheckResult]) -> bool:
    return all(r.passed for r in results)
