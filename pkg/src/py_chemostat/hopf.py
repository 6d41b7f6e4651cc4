"""
Locating the Hopf point ``mu_c2`` of the coexistence equilibrium.

Along the branch ``E2(mu)`` the characteristic polynomial factors as
``(alpha - x)(x^2 - gamma x + beta)``. The pair's real part ``gamma / 2``
is tracked over ``mu``; a sign change with negative ``alpha`` and negative
discriminant is refined with ``scipy.optimize.brentq`` and certified.
"""

import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .equilibria import Point, coexistence, coexistence_nutrient, lambda_p, mu_c1
from .errors import (
    BracketError,
    ConvergenceError,
    CrossCheckError,
    ExistenceError,
    FactorizationDomainError,
    PairCollisionError,
    TransversalityError,
)
from .helpers import parallel_map
from .responses import Parameters
from .stability import (
    SpectrumFactorization,
    Stability,
    abc_equal_removal,
    char_coeffs_e2,
    factorize,
    routh_hurwitz,
    secant_tangent_margin,
)

logger = logging.getLogger(__name__)

CROSSING_TOL = 1e-10
EQUAL_REMOVAL_AGREEMENT = 1e-8
_BRACKET_SAMPLES = 41
_CONCAVITY_GRID = np.geomspace(1e-6, 1e4, 400)


class Crossing(NamedTuple):
    mu_lo: float
    mu_hi: float
    rising: bool


@dataclass(frozen=True)
class BranchSample:
    mu: float
    point: Point
    factorization: SpectrumFactorization
    classification: Stability


@dataclass(frozen=True)
class RealPartCurve:
    """Pair real part, real eigenvalue and discriminant along a grid in ``mu``."""

    mu_grid: np.ndarray
    re_pair: np.ndarray
    im_pair: np.ndarray
    alpha_track: np.ndarray
    discriminants: np.ndarray
    nutrient: np.ndarray
    predator: np.ndarray
    classifications: tuple[Stability, ...]
    # Eigenvalues ordered so that column j follows one root continuously.
    tracks: np.ndarray

    def sign_changes(self) -> list[Crossing]:
        found = []
        for k in range(len(self.mu_grid) - 1):
            left, right = self.re_pair[k], self.re_pair[k + 1]
            if left == 0.0 or left * right < 0.0:
                found.append(Crossing(float(self.mu_grid[k]), float(self.mu_grid[k + 1]),
                                      bool(right > left)))
        return found

    def rows(self) -> list[dict]:
        return [
            {
                "mu": float(self.mu_grid[k]),
                "N": float(self.nutrient[k]),
                "Z": float(self.predator[k]),
                "re_pair": float(self.re_pair[k]),
                "im_pair": float(self.im_pair[k]),
                "alpha": float(self.alpha_track[k]),
                "discriminant": float(self.discriminants[k]),
                "classification": self.classifications[k],
            }
            for k in range(len(self.mu_grid))
        ]


@dataclass(frozen=True)
class HypothesisFlags:
    concavity_condition: bool
    concavity_margin: float
    f1_second_negative_at_crossing: bool | None
    f1_globally_concave: bool


@dataclass(frozen=True)
class HopfCertificate:
    mu_c2: float
    bracket: tuple[float, float]
    re_slope: float
    imag_at_crossing: float
    alpha_at_crossing: float
    discriminant_at_crossing: float
    hypothesis_flags: HypothesisFlags
    equal_removal_root: float | None = None


@dataclass(frozen=True)
class RadiusBound:
    radius: float
    max_difference: float
    max_ratio: float


@dataclass(frozen=True)
class PerturbationBoundReport:
    """
    How closely the perturbed crossing speed follows the equal-removal one:
    per radius, the largest ``|gamma'(D1, D2)(mu) - A'(mu)|`` and its ratio
    to the distance from ``(D, D)``.
    """

    D: float
    mu_interval: tuple[float, float]
    bounds: list[RadiusBound] = field(default_factory=list)

    @property
    def spread(self) -> float:
        ratios = [b.max_ratio for b in self.bounds]
        return max(ratios) / min(ratios) if ratios and min(ratios) > 0 else math.inf

    def bounded(self, factor: float = 2.0) -> bool:
        return self.spread < factor


def branch_sample(params: Parameters, mu: float) -> BranchSample:
    """Factorized spectrum of ``E2`` at feed concentration ``mu``."""
    at_mu = params.with_mu(mu)
    point = coexistence(at_mu)
    if point is None:
        raise ExistenceError(
            f"coexistence equilibrium does not exist at mu={mu!r} (mu_c1={mu_c1(at_mu)!r})"
        )
    coeffs = char_coeffs_e2(at_mu, point)
    return BranchSample(
        mu=float(mu),
        point=point,
        factorization=factorize(coeffs, mu=mu),
        classification=routh_hurwitz(coeffs),
    )


def pair_real_part(params: Parameters, mu: float) -> float:
    return branch_sample(params, mu).factorization.re_pair


def _track(eigs: np.ndarray) -> np.ndarray:
    """Reorder each row to minimize the total displacement from the previous row."""
    tracks = eigs.copy()
    for k in range(1, len(tracks)):
        prev = tracks[k - 1]
        best = min(
            itertools.permutations(range(3)),
            key=lambda perm: sum(abs(prev[j] - eigs[k][perm[j]]) for j in range(3)),
        )
        tracks[k] = eigs[k][list(best)]
    return tracks


def _curve(samples: Sequence[BranchSample]) -> RealPartCurve:
    facs = [s.factorization for s in samples]
    return RealPartCurve(
        mu_grid=np.array([s.mu for s in samples]),
        re_pair=np.array([f.re_pair for f in facs]),
        im_pair=np.array([f.im_pair for f in facs]),
        alpha_track=np.array([f.alpha for f in facs]),
        discriminants=np.array([f.discriminant for f in facs]),
        nutrient=np.array([s.point.n for s in samples]),
        predator=np.array([s.point.z for s in samples]),
        classifications=tuple(s.classification for s in samples),
        tracks=_track(np.array([f.eigenvalues for f in facs], dtype=complex)),
    )


def real_part_curve(params: Parameters, mu_lo: float, mu_hi: float, n: int,
                    workers: int = 1) -> RealPartCurve:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n!r}")
    if not mu_lo < mu_hi:
        raise ValueError(f"mu_lo must be < mu_hi, got ({mu_lo!r}, {mu_hi!r})")
    threshold = mu_c1(params)
    if not mu_lo > threshold:
        raise ExistenceError(f"mu_lo={mu_lo!r} must exceed mu_c1={threshold!r}")
    grid = np.linspace(mu_lo, mu_hi, n)
    samples = parallel_map(lambda mu: branch_sample(params, float(mu)), grid, workers)
    return _curve(samples)


def _try_sample(params: Parameters, mu: float) -> BranchSample | None:
    try:
        return branch_sample(params, mu)
    except FactorizationDomainError as exc:
        logger.debug("Skipping mu=%r: %s", mu, exc)
        return None


def scan_curve(params: Parameters, mu_lo: float, mu_hi: float, n: int,
               workers: int = 1) -> RealPartCurve:
    """
    Like ``real_part_curve`` but tolerant: grid points at or below ``mu_c1``
    are trimmed with a warning and points without a unique most negative real
    root are skipped.
    """
    if n < 2 or not mu_lo < mu_hi:
        raise ValueError(f"Invalid scan range: lo={mu_lo!r}, hi={mu_hi!r}, n={n!r}")
    threshold = mu_c1(params)
    grid = np.linspace(mu_lo, mu_hi, n)
    kept = grid[grid > threshold]
    if len(kept) < len(grid):
        logger.warning("Trimmed %d of %d scan points at or below mu_c1=%.6g",
                       len(grid) - len(kept), len(grid), threshold)
    samples = parallel_map(lambda mu: _try_sample(params, float(mu)), kept, workers)
    samples = [s for s in samples if s is not None]
    if len(samples) < len(kept):
        logger.warning("Skipped %d scan points without a factorizable spectrum",
                       len(kept) - len(samples))
    if not samples:
        raise ExistenceError(
            f"No scan point in [{mu_lo!r}, {mu_hi!r}] has a factorizable spectrum"
        )
    return _curve(samples)


def scan_crossings(params: Parameters, mu_lo: float, mu_hi: float, n: int = 41,
                   workers: int = 1) -> list[Crossing]:
    """Every sign change of the pair's real part on a grid, in ascending ``mu``."""
    return scan_curve(params, mu_lo, mu_hi, n, workers).sign_changes()


def default_bracket(params: Parameters, n: int = 41, workers: int = 1) -> tuple[float, float]:
    """
    Heuristic search window ``[1.05 mu_c1, mu_c1 + 10 (mu_c1 - lambda_P)]``,
    narrowed to the first rising crossing on an ``n``-point grid.
    """
    threshold = mu_c1(params)
    lo = 1.05 * threshold
    hi = threshold + 10.0 * (threshold - lambda_p(params))
    for crossing in scan_crossings(params, lo, hi, n, workers):
        if crossing.rising:
            return crossing.mu_lo, crossing.mu_hi
    raise BracketError(f"No rising crossing of the pair's real part in [{lo!r}, {hi!r}]")


def hypothesis_predicates(params: Parameters, mu_c2: float | None = None) -> HypothesisFlags:
    margin = secant_tangent_margin(params, params.D)
    second_at_crossing = None
    if mu_c2 is not None:
        n = coexistence_nutrient(params.with_mu(mu_c2))
        second_at_crossing = params.f1.eval(n, 2) < 0
    return HypothesisFlags(
        concavity_condition=margin > 0,
        concavity_margin=margin,
        f1_second_negative_at_crossing=second_at_crossing,
        f1_globally_concave=all(params.f1.eval(float(x), 2) < 0 for x in _CONCAVITY_GRID),
    )


def _check_bracket_spectrum(params: Parameters, lo: float, hi: float) -> None:
    """Complex pair and negative real eigenvalue at every grid point of the bracket."""
    for mu in np.linspace(lo, hi, _BRACKET_SAMPLES):
        try:
            factorization = branch_sample(params, float(mu)).factorization
        except FactorizationDomainError as exc:
            raise PairCollisionError(f"complex pair lost inside bracket at mu={mu!r}") from exc
        if factorization.discriminant >= 0:
            raise PairCollisionError(
                f"pair discriminant {factorization.discriminant!r} >= 0 at mu={mu!r} "
                f"inside the bracket"
            )
        if not factorization.alpha < 0:
            raise TransversalityError(
                f"real eigenvalue {factorization.alpha!r} at mu={mu!r} inside the bracket "
                f"is not negative"
            )


def _brentq(func, lo: float, hi: float, what: str) -> float:
    try:
        return float(brentq(func, lo, hi, xtol=1e-14))
    except ValueError as exc:
        raise BracketError(f"{what} is not bracketed by ({lo!r}, {hi!r}): {exc}") from exc
    except RuntimeError as exc:
        raise ConvergenceError(f"{what} did not converge in ({lo!r}, {hi!r}): {exc}") from exc


def _equal_removal_root(params: Parameters, lo: float, hi: float) -> float:
    def a_of(mu: float) -> float:
        return abc_equal_removal(params.with_mu(mu)).A

    return _brentq(a_of, lo, hi, "zero of A(mu)")


def find_hopf(params: Parameters, bracket: tuple[float, float]) -> HopfCertificate:
    """
    Refine the zero of the pair's real part inside ``bracket`` and certify the
    crossing: positive speed, negative real eigenvalue, complex pair.
    """
    lo, hi = (float(b) for b in bracket)
    if not lo < hi:
        raise ValueError(f"Invalid bracket: ({lo!r}, {hi!r})")
    threshold = mu_c1(params)
    if not lo > threshold:
        raise ExistenceError(f"bracket start {lo!r} must exceed mu_c1={threshold!r}")

    _check_bracket_spectrum(params, lo, hi)

    def re(mu: float) -> float:
        return pair_real_part(params, mu)

    re_lo, re_hi = re(lo), re(hi)
    if re_lo * re_hi > 0:
        raise BracketError(
            f"pair real part has the same sign at both ends of ({lo!r}, {hi!r}): "
            f"{re_lo!r}, {re_hi!r}"
        )
    mu_c2 = _brentq(re, lo, hi, "pair real part")
    crossing = branch_sample(params, mu_c2).factorization
    if abs(crossing.re_pair) > CROSSING_TOL:
        raise ConvergenceError(
            f"crossing not resolved: Re={crossing.re_pair!r} at mu={mu_c2!r}"
        )

    h = 1e-6 * (hi - lo)
    slope = (re(mu_c2 + h) - re(mu_c2 - h)) / (2.0 * h)
    if not slope > 0:
        raise TransversalityError(f"crossing speed {slope!r} at mu={mu_c2!r} is not positive")
    if not crossing.alpha < 0:
        raise TransversalityError(
            f"real eigenvalue {crossing.alpha!r} at mu={mu_c2!r} is not negative"
        )

    a_root = None
    if params.equal_removal:
        a_root = _equal_removal_root(params, lo, hi)
        if abs(a_root - mu_c2) > EQUAL_REMOVAL_AGREEMENT:
            raise CrossCheckError(
                f"zero of A(mu) at {a_root!r} and pair crossing at {mu_c2!r} differ by more "
                f"than {EQUAL_REMOVAL_AGREEMENT!r}"
            )

    logger.info("Hopf crossing at mu=%.10g (slope %.4g, omega %.4g)",
                mu_c2, slope, crossing.im_pair)
    return HopfCertificate(
        mu_c2=mu_c2,
        bracket=(lo, hi),
        re_slope=slope,
        imag_at_crossing=crossing.im_pair,
        alpha_at_crossing=crossing.alpha,
        discriminant_at_crossing=crossing.discriminant,
        hypothesis_flags=hypothesis_predicates(params, mu_c2),
        equal_removal_root=a_root,
    )


def locate_hopf(params: Parameters, n: int = 41, workers: int = 1) -> HopfCertificate:
    return find_hopf(params, default_bracket(params, n, workers))


def derivative_gap(params: Parameters, D1: float, D2: float, mu: float) -> float:
    """
    ``|gamma'(D1, D2)(mu) - A'(mu)|`` with ``gamma'`` by central differences
    (step ``1e-5 max(1, |mu|)``) and ``A'`` in closed form at ``(D, D)``.
    """
    perturbed = params.with_removal(D1, D2)
    h = 1e-5 * max(1.0, abs(mu))
    gamma_slope = (
        branch_sample(perturbed, mu + h).factorization.gamma
        - branch_sample(perturbed, mu - h).factorization.gamma
    ) / (2.0 * h)
    a_slope = abc_equal_removal(params.with_mu(mu)).a_prime
    return abs(gamma_slope - a_slope)


def appendix_bound_check(
    params: Parameters,
    radii: Sequence[float],
    samples_per_circle: int,
    mu_interval: tuple[float, float],
    n_mu: int = 11,
    workers: int = 1,
) -> PerturbationBoundReport:
    """
    Sample ``(D1, D2)`` on circles around ``(D, D)`` and bound how far the
    perturbed crossing speed strays from ``A'(mu)`` over ``mu_interval``.
    """
    if not params.equal_removal:
        raise ValueError("appendix_bound_check needs the unperturbed rates D = D1 = D2")
    if samples_per_circle < 1:
        raise ValueError(f"samples_per_circle must be >= 1, got {samples_per_circle!r}")
    if any(not r > 0 for r in radii):
        raise ValueError(f"radii must be positive, got {list(radii)!r}")
    D = params.D
    mus = [float(mu) for mu in np.linspace(mu_interval[0], mu_interval[1], n_mu)]

    interval = (float(mu_interval[0]), float(mu_interval[1]))
    report = PerturbationBoundReport(D=D, mu_interval=interval)
    for radius in radii:
        angles = 2.0 * math.pi * np.arange(samples_per_circle) / samples_per_circle
        centers = [(D + radius * math.cos(a), D + radius * math.sin(a)) for a in angles]

        def worst_gap(rates: tuple[float, float]) -> float:
            return max(derivative_gap(params, rates[0], rates[1], mu) for mu in mus)

        worst = max(parallel_map(worst_gap, centers, workers))
        report.bounds.append(RadiusBound(radius=float(radius), max_difference=worst,
                                         max_ratio=worst / radius))
        logger.info("radius %.4g: max gap %.4g, ratio %.4g", radius, worst, worst / radius)
    return report
