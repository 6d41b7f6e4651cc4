"""
Local stability of the equilibria.

Characteristic polynomials use the convention

    p(x) = det(J - x I) = p0 + p1 x + p2 x^2 - x^3

so that ``p_i = -a_{3-i}`` where ``x^3 + a1 x^2 + a2 x + a3`` is the monic form
used by Routh-Hurwitz. Roots come from a closed-form cubic solver followed by
a Newton polish.
"""

import cmath
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import auto

import numpy as np

from .equilibria import Point, branch_derivatives, coexistence, lambda_z, single_species
from .errors import ContractViolationError, ExistenceError, FactorizationDomainError
from .helpers import StrAutoEnum
from .responses import Parameters

logger = logging.getLogger(__name__)

MARGINAL_TOL = 1e-9
REAL_ROOT_TOL = 1e-8
_POLISH_STEPS = 3


class Stability(StrAutoEnum):
    STABLE = auto()
    UNSTABLE = auto()
    MARGINAL = auto()


@dataclass(frozen=True)
class CubicCoeffs:
    """Coefficients of ``p0 + p1 x + p2 x^2 - x^3``."""

    p0: float
    p1: float
    p2: float

    @property
    def a1(self) -> float:
        return -self.p2

    @property
    def a2(self) -> float:
        return -self.p1

    @property
    def a3(self) -> float:
        return -self.p0

    @classmethod
    def from_monic(cls, a1: float, a2: float, a3: float) -> "CubicCoeffs":
        """Build from ``x^3 + a1 x^2 + a2 x + a3``."""
        return cls(-a3, -a2, -a1)

    @classmethod
    def from_roots(cls, roots: Iterable[complex]) -> "CubicCoeffs":
        r1, r2, r3 = (complex(r) for r in roots)
        return cls(
            p0=(r1 * r2 * r3).real,
            p1=-(r1 * r2 + r1 * r3 + r2 * r3).real,
            p2=(r1 + r2 + r3).real,
        )

    def __call__(self, x: complex) -> complex:
        return self.p0 + x * (self.p1 + x * (self.p2 - x))

    def scale(self) -> float:
        return max(1.0, abs(self.p0), abs(self.p1), abs(self.p2))


@dataclass(frozen=True)
class SpectrumFactorization:
    """
    Splitting of the characteristic polynomial into ``(alpha - x)`` times
    ``x^2 - gamma x + beta``. The pair's real part is ``gamma / 2``.
    """

    alpha: float
    beta: float
    gamma: float
    eigenvalues: tuple[complex, complex, complex]

    @property
    def discriminant(self) -> float:
        return self.gamma**2 - 4.0 * self.beta

    @property
    def pair(self) -> tuple[complex, complex]:
        return self.eigenvalues[1], self.eigenvalues[2]

    @property
    def re_pair(self) -> float:
        return 0.5 * self.gamma

    @property
    def im_pair(self) -> float:
        """Positive imaginary part of the pair, 0 when the pair is real."""
        return 0.5 * math.sqrt(max(-self.discriminant, 0.0))

    @property
    def map_jacobian_det(self) -> float:
        """
        Jacobian determinant of ``(alpha, beta, gamma) -> (p0, p1, p2)``.
        Nonzero means the factorization depends smoothly on the coefficients.
        """
        return -(self.beta - self.alpha * self.gamma + self.alpha**2)

    def reconstruct(self) -> CubicCoeffs:
        a, b, g = self.alpha, self.beta, self.gamma
        return CubicCoeffs(p0=a * b, p1=-a * g - b, p2=a + g)


@dataclass(frozen=True)
class ABCReport:
    """
    Equal-removal-rate splitting ``p(x) = (-D - x)(x^2 - A x - B C)`` at one
    feed concentration, with ``a_prime = dA/dmu``.
    """

    mu: float
    A: float
    B: float
    C: float
    a_prime: float

    @property
    def discriminant(self) -> float:
        """Discriminant of the quadratic factor, ``A^2 + 4 B C``."""
        return self.A**2 + 4.0 * self.B * self.C

    @property
    def stability(self) -> Stability:
        if self.A < 0:
            return Stability.STABLE
        if self.A > 0:
            return Stability.UNSTABLE
        return Stability.MARGINAL


def jacobian(params: Parameters, at: Sequence[float]) -> np.ndarray:
    n, p, z = (float(v) for v in at)
    f1, f2 = params.f1, params.f2
    f1_n, f1_slope = f1.eval(n), f1.eval(n, 1)
    f2_p, f2_slope = f2.eval(p), f2.eval(p, 1)
    return np.array(
        [
            [-params.D - p * f1_slope, -f1_n, 0.0],
            [
                params.gamma1 * p * f1_slope,
                params.gamma1 * f1_n - params.D1 - z * f2_slope,
                -f2_p,
            ],
            [0.0, params.gamma2 * z * f2_slope, params.gamma2 * f2_p - params.D2],
        ]
    )


def char_coeffs(matrix: np.ndarray) -> CubicCoeffs:
    """Coefficients of ``det(M - x I)`` from the trace, principal minors and determinant."""
    m = np.asarray(matrix, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"Expected a 3x3 matrix, got shape {m.shape}")
    minors = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    return CubicCoeffs(p0=float(np.linalg.det(m)), p1=-float(minors), p2=float(np.trace(m)))


def _require_e2(params: Parameters) -> Point:
    point = coexistence(params)
    if point is None:
        raise ExistenceError(f"coexistence equilibrium does not exist at mu={params.mu!r}")
    return point


def char_coeffs_e2(params: Parameters, point: Point | None = None) -> CubicCoeffs:
    """Characteristic coefficients at the coexistence equilibrium in closed form."""
    n, lz, z = _require_e2(params) if point is None else point
    D, D1, D2 = params.D, params.D1, params.D2
    f1_n, f1_slope = params.f1.eval(n), params.f1.eval(n, 1)
    f2_slope = params.f2.eval(lz, 1)
    g1 = params.gamma1

    a1 = z * f2_slope + lz * f1_slope - g1 * f1_n + D1 + D
    a2 = (
        lz * z * f1_slope * f2_slope
        + D2 * z * f2_slope
        + D * z * f2_slope
        + D1 * lz * f1_slope
        - D * g1 * f1_n
        + D * D1
    )
    a3 = D2 * z * f2_slope * (D + lz * f1_slope)
    return CubicCoeffs.from_monic(a1, a2, a3)


def routh_hurwitz(c: CubicCoeffs, tol: float = MARGINAL_TOL) -> Stability:
    """
    Classify a cubic with ``a3 > 0``: stable iff ``a1 > 0`` and ``a1 a2 > a3``.
    ``tol`` is relative to ``max(1, |a1 a2|)``.
    """
    a1, a2, a3 = c.a1, c.a2, c.a3
    if not a3 > 0:
        raise ContractViolationError(f"Routh-Hurwitz needs a3 > 0, got a3={a3!r}")
    threshold = tol * max(1.0, abs(a1 * a2))
    hurwitz = a1 * a2 - a3
    if a1 > threshold and hurwitz > threshold:
        return Stability.STABLE
    if a1 > 0 and abs(hurwitz) <= threshold:
        return Stability.MARGINAL
    return Stability.UNSTABLE


def classify_spectrum(eigs: Iterable[complex], tol: float = MARGINAL_TOL) -> Stability:
    leading = max(complex(e).real for e in eigs)
    if leading < -tol:
        return Stability.STABLE
    if leading > tol:
        return Stability.UNSTABLE
    return Stability.MARGINAL


def _monic(x: complex, a1: float, a2: float, a3: float) -> complex:
    return ((x + a1) * x + a2) * x + a3


def _polish(x: complex, a1: float, a2: float, a3: float) -> complex:
    residual = abs(_monic(x, a1, a2, a3))
    for _ in range(_POLISH_STEPS):
        slope = (3.0 * x + 2.0 * a1) * x + a2
        if slope == 0 or residual == 0:
            break
        candidate = x - _monic(x, a1, a2, a3) / slope
        candidate_residual = abs(_monic(candidate, a1, a2, a3))
        if candidate_residual >= residual:
            break
        x, residual = candidate, candidate_residual
    return x


def _solve_monic(a1: float, a2: float, a3: float) -> tuple[list[complex], bool]:
    """Roots of ``x^3 + a1 x^2 + a2 x + a3`` and whether all three are real."""
    shift = a1 / 3.0
    p = a2 - a1 * shift
    q = 2.0 * shift**3 - shift * a2 + a3
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    if disc > 0:
        # One real root. Pick the larger cube-root argument to avoid cancellation.
        u = math.cbrt(-q / 2.0 - math.copysign(math.sqrt(disc), q))
        t = u - p / (3.0 * u) if u != 0 else math.cbrt(-q)
        real = _polish(t - shift, a1, a2, a3).real
        # Deflate to x^2 + e1 x + e0.
        e1 = a1 + real
        e0 = -a3 / real if abs(real) > 1e-8 else a2 + real * e1
        root = cmath.sqrt(e1 * e1 / 4.0 - e0)
        upper = _polish(-e1 / 2.0 + (root if root.imag >= 0 else -root), a1, a2, a3)
        if upper.imag == 0:
            lower = _polish(-e1 / 2.0 - root, a1, a2, a3)
        else:
            lower = upper.conjugate()
        return [complex(real), complex(upper), complex(lower)], False

    if p == 0:
        return [complex(-shift)] * 3, True
    radius = 2.0 * math.sqrt(-p / 3.0)
    cos_arg = max(-1.0, min(1.0, (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)))
    theta = math.acos(cos_arg) / 3.0
    roots = [
        _polish(radius * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift, a1, a2, a3).real
        for k in range(3)
    ]
    return [complex(r) for r in sorted(roots)], True


def eigenvalues(c: CubicCoeffs) -> tuple[complex, complex, complex]:
    """
    Roots of ``p0 + p1 x + p2 x^2 - x^3``. With one real root it comes first,
    followed by the pair (positive imaginary part first); otherwise the three
    real roots in ascending order.
    """
    roots, _ = _solve_monic(c.a1, c.a2, c.a3)
    return tuple(roots)


def factorize(c: CubicCoeffs, mu: float | None = None) -> SpectrumFactorization:
    """
    Split the cubic into a real linear factor ``alpha`` and a quadratic
    carrying the remaining pair.

    With one real root it becomes ``alpha``. With three real roots the most
    negative one is chosen and the pair is real; a tie for the most negative
    root raises ``FactorizationDomainError``.
    """
    roots = list(eigenvalues(c))
    scale = max(1.0, max(abs(r) for r in roots))
    tol = REAL_ROOT_TOL * scale
    real_index = [i for i, r in enumerate(roots) if abs(r.imag) < tol]
    if len(real_index) == 1:
        alpha = roots.pop(real_index[0]).real
        pair = sorted(roots, key=lambda r: -r.imag)
    elif len(real_index) == 3:
        lowest, middle, highest = sorted(r.real for r in roots)
        if middle - lowest <= tol:
            raise FactorizationDomainError(
                f"most negative real root is not unique, got roots {roots}", mu=mu
            )
        alpha = lowest
        pair = [complex(middle), complex(highest)]
    else:
        raise FactorizationDomainError(
            f"expected a real root and a pair, got roots {roots}", mu=mu
        )
    gamma = c.p2 - alpha
    beta = -c.p1 - alpha * gamma
    return SpectrumFactorization(
        alpha=alpha, beta=beta, gamma=gamma, eigenvalues=(complex(alpha), pair[0], pair[1])
    )


def secant_tangent_margin(params: Parameters, removal: float | None = None) -> float:
    """
    ``removal / (gamma2 lambda_Z) - f2'(lambda_Z)`` at ``lambda_Z(removal)``,
    the secant slope of ``f2`` through the origin minus its tangent slope.
    Positive margins keep the pair's real part increasing in ``Z``.
    """
    removal = params.D if removal is None else removal
    lz = lambda_z(params, removal)
    return removal / (params.gamma2 * lz) - params.f2.eval(lz, 1)


def abc_equal_removal(params: Parameters) -> ABCReport:
    if not params.equal_removal:
        raise ContractViolationError(
            f"abc_equal_removal needs D = D1 = D2, got D={params.D!r}, D1={params.D1!r}, "
            f"D2={params.D2!r}"
        )
    n, lz, z = _require_e2(params)
    D, g2 = params.D, params.gamma2
    f1_slope = params.f1.eval(n, 1)
    f2_slope = params.f2.eval(lz, 1)
    margin = D / (g2 * lz) - f2_slope

    n_prime, z_prime = branch_derivatives(params, n)
    return ABCReport(
        mu=params.mu,
        A=z * margin - lz * f1_slope,
        B=-(lz * f1_slope + D) / g2,
        C=g2 * z * f2_slope,
        a_prime=z_prime * margin - lz * params.f1.eval(n, 2) * n_prime,
    )


def boundary_eigenvalues(params: Parameters, which: str) -> tuple[complex, complex, complex]:
    """Closed-form spectra at ``E0`` or ``E1``."""
    match which.strip().upper():
        case "E0":
            growth = params.gamma1 * params.f1.eval(params.mu) - params.D1
            return complex(-params.D), complex(growth), complex(-params.D2)
        case "E1":
            point = single_species(params)
            if point is None:
                raise ExistenceError(f"E1 does not exist at mu={params.mu!r}")
            lp, prey, _ = point
            f1_slope = params.f1.eval(lp, 1)
            trace = -params.D - prey * f1_slope
            det = params.f1.eval(lp) * params.gamma1 * prey * f1_slope
            root = cmath.sqrt(trace * trace / 4.0 - det)
            third = params.gamma2 * params.f2.eval(prey) - params.D2
            return trace / 2.0 + root, trace / 2.0 - root, complex(third)
        case _:
            raise ValueError(f"Invalid boundary equilibrium: {which!r}. Available: ['E0', 'E1']")
