"""
Break-even concentrations and the three equilibria of the chemostat system.

* ``E0 = (mu, 0, 0)`` (washout) always exists.
* ``E1 = (lambda_P(D1), P*, 0)`` exists for ``mu > lambda_P(D1)``.
* ``E2 = (N*, lambda_Z(D2), Z*)`` exists for ``mu > mu_c1(D1, D2)``.

Scalar roots are found with a bracketed Newton iteration that falls back to
bisection whenever a Newton step leaves the bracket or stalls.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import NamedTuple

from .errors import BracketError, ContractViolationError, ConvergenceError, NoBreakEvenError
from .responses import HollingII, Parameters, Response

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-12
_MAX_BRACKET_DOUBLINGS = 1100


class Point(NamedTuple):
    n: float
    p: float
    z: float


@dataclass(frozen=True)
class EquilibriumSet:
    mu: float
    e0: Point
    e1: Point | None
    e2: Point | None
    lambda_p: float
    lambda_z: float
    mu_c1: float

    def present(self) -> dict[str, Point]:
        """Existing equilibria keyed by name, in order E0, E1, E2."""
        named = {"E0": self.e0, "E1": self.e1, "E2": self.e2}
        return {name: point for name, point in named.items() if point is not None}


def bracketed_newton(
    fdf: Callable[[float], tuple[float, float]],
    lo: float,
    hi: float,
    xtol: float = ROOT_XTOL,
    max_iter: int = 200,
) -> float:
    """
    Find a root of ``f`` in ``[lo, hi]`` given ``fdf(x) -> (f(x), f'(x))``.

    ``f(lo)`` and ``f(hi)`` must differ in sign. A Newton step is taken when
    it stays inside the current bracket and shrinks the residual fast enough;
    otherwise the bracket is bisected. Stops when the last step is below
    ``xtol``.
    """
    f_lo, _ = fdf(lo)
    f_hi, _ = fdf(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise BracketError(f"Root not bracketed: f({lo!r})={f_lo!r}, f({hi!r})={f_hi!r}")

    # Orient so that f(x_neg) < 0 < f(x_pos).
    x_neg, x_pos = (lo, hi) if f_lo < 0.0 else (hi, lo)
    x = 0.5 * (lo + hi)
    dx_old = dx = abs(hi - lo)
    f, df = fdf(x)
    for iteration in range(max_iter):
        out_of_bracket = ((x - x_pos) * df - f) * ((x - x_neg) * df - f) > 0.0
        if out_of_bracket or abs(2.0 * f) > abs(dx_old * df):
            dx_old, dx = dx, 0.5 * (x_pos - x_neg)
            x = x_neg + dx
        else:
            dx_old, dx = dx, f / df
            x -= dx
        if abs(dx) < xtol:
            logger.debug("bracketed_newton converged in %d iterations", iteration + 1)
            return x
        f, df = fdf(x)
        if f == 0.0:
            return x
        if f < 0.0:
            x_neg = x
        else:
            x_pos = x
    raise ConvergenceError(f"bracketed_newton did not converge in {max_iter} iterations")


def break_even(response: Response, gamma: float, removal: float) -> float:
    """Return the unique ``lam`` with ``gamma * f(lam) = removal``."""
    if not removal > 0:
        raise ValueError(f"removal rate must be > 0, got {removal!r}")
    ceiling = gamma * response.supremum()
    if removal >= ceiling:
        raise NoBreakEvenError(
            f"removal rate {removal!r} >= gamma*sup(f) = {ceiling!r}; no break-even concentration"
        )

    hi = 1.0
    for _ in range(_MAX_BRACKET_DOUBLINGS):
        if gamma * response.eval(hi) > removal:
            break
        hi *= 2.0
    else:
        raise NoBreakEvenError(f"could not bracket the break-even concentration for {response!r}")

    def fdf(x: float) -> tuple[float, float]:
        return gamma * response.eval(x) - removal, gamma * response.eval(x, 1)

    return bracketed_newton(fdf, 0.0, hi, xtol=ROOT_XTOL * max(1.0, hi))


def lambda_prime(response: Response, gamma: float, lam: float) -> float:
    """Derivative of the break-even concentration with respect to the removal rate."""
    slope = response.eval(lam, 1)
    if not slope > 0:
        raise ContractViolationError(f"f'({lam!r}) = {slope!r} must be positive")
    return 1.0 / (gamma * slope)


def lambda_p(params: Parameters, removal: float | None = None) -> float:
    """Prey break-even nutrient level, at ``D1`` unless ``removal`` is given."""
    return break_even(params.f1, params.gamma1, params.D1 if removal is None else removal)


def lambda_z(params: Parameters, removal: float | None = None) -> float:
    """Predator break-even prey level, at ``D2`` unless ``removal`` is given."""
    return break_even(params.f2, params.gamma2, params.D2 if removal is None else removal)


def mu_c1(params: Parameters) -> float:
    """Feed concentration above which the coexistence equilibrium exists."""
    return lambda_p(params) + params.D1 * lambda_z(params) / (params.D * params.gamma1)


def single_species(params: Parameters, boundary: bool = False) -> Point | None:
    """
    Prey-only equilibrium ``E1``, or None when ``mu <= lambda_P(D1)``.
    With ``boundary=True`` the coalescence point ``mu = lambda_P`` is included.
    """
    lp = lambda_p(params)
    if not (params.mu > lp or (boundary and params.mu == lp)):
        return None
    prey = (params.mu - lp) * params.D * params.gamma1 / params.D1
    return Point(lp, prey, 0.0)


def _nutrient_equation(params: Parameters, lz: float) -> Callable[[float], tuple[float, float]]:
    mu, D, f1 = params.mu, params.D, params.f1

    def fdf(n: float) -> tuple[float, float]:
        return (mu - n) * D - lz * f1.eval(n), -D - lz * f1.eval(n, 1)

    return fdf


def coexistence_nutrient(params: Parameters, lz: float | None = None) -> float:
    """Solve ``(mu - N) D - lambda_Z f1(N) = 0`` for ``N`` on ``(0, mu)``."""
    lz = lambda_z(params) if lz is None else lz
    fdf = _nutrient_equation(params, lz)
    at_zero, _ = fdf(0.0)
    at_mu, _ = fdf(params.mu)
    # Strictly decreasing in N, so this sign pattern certifies a unique root.
    if not at_zero > 0.0 > at_mu:
        raise BracketError(
            f"nutrient equation not bracketed on [0, {params.mu!r}]: {at_zero!r}, {at_mu!r}"
        )
    return bracketed_newton(fdf, 0.0, params.mu, xtol=ROOT_XTOL)


def _predator_level(params: Parameters, lz: float, n: float) -> float:
    return (params.gamma2 / params.D2) * lz * (params.gamma1 * params.f1.eval(n) - params.D1)


def coexistence(params: Parameters, boundary: bool = False) -> Point | None:
    """
    Coexistence equilibrium ``E2``, or None when ``mu <= mu_c1``.
    With ``boundary=True`` the coalescence point ``mu = mu_c1`` is included.
    """
    threshold = mu_c1(params)
    if not (params.mu > threshold or (boundary and params.mu == threshold)):
        return None
    lz = lambda_z(params)
    n = coexistence_nutrient(params, lz)
    z = max(_predator_level(params, lz, n), 0.0)
    return Point(n, lz, z)


def coexistence_residuals(params: Parameters, point: Point) -> tuple[float, float]:
    """Residuals of the two steady-state equations that define ``E2``."""
    n, lz, z = point
    f1 = params.f1.eval(n)
    first = (params.mu - n) * params.D - lz * f1
    second = params.gamma1 * lz * f1 - params.D1 * lz - z * params.f2.eval(lz)
    return first, second


def holling2_nutrient(params: Parameters) -> float:
    """
    Closed-form coexistence nutrient for a Holling II prey response: the
    positive root of ``D N^2 - (D mu - D alpha - lambda_Z m) N - D mu alpha = 0``.
    """
    if not isinstance(params.f1, HollingII):
        raise TypeError(f"holling2_nutrient needs a HollingII f1, got {params.f1!r}")
    D, mu = params.D, params.mu
    m, alpha = params.f1.m, params.f1.alpha
    b = D * mu - D * alpha - lambda_z(params) * m
    disc = math.sqrt(b * b + 4.0 * D * D * mu * alpha)
    if b >= 0.0:
        return (b + disc) / (2.0 * D)
    return 2.0 * D * mu * alpha / (disc - b)


def branch_derivatives(params: Parameters, n: float | None = None) -> tuple[float, float]:
    """
    Return ``(N'(mu), Z'(mu))`` along the coexistence branch, from the implicit
    relations ``N' (D + lambda_Z f1'(N)) = D`` and
    ``Z' = (gamma1 gamma2 / D2) lambda_Z f1'(N) N'``.
    """
    lz = lambda_z(params)
    n = coexistence_nutrient(params, lz) if n is None else n
    f1_slope = params.f1.eval(n, 1)
    n_prime = params.D / (params.D + lz * f1_slope)
    z_prime = (params.gamma1 * params.gamma2 / params.D2) * lz * f1_slope * n_prime
    return n_prime, z_prime


def predator_bound(params: Parameters) -> float:
    """Supremum of ``Z*(mu)`` over all feed concentrations."""
    lz = lambda_z(params)
    return (params.gamma2 / params.D2) * lz * (params.gamma1 * params.f1.supremum() - params.D1)


def equilibrium_set(params: Parameters) -> EquilibriumSet:
    return EquilibriumSet(
        mu=params.mu,
        e0=Point(params.mu, 0.0, 0.0),
        e1=single_species(params),
        e2=coexistence(params),
        lambda_p=lambda_p(params),
        lambda_z=lambda_z(params),
        mu_c1=mu_c1(params),
    )
