"""
Functional responses (per-capita uptake curves) and the model parameterization.

A ``Response`` is an increasing, bounded curve with ``f(0) = 0``. Concrete
families register themselves under a ``kind`` name with
``@Response.register(kind)`` so configs can build them by name. ``Parameters``
bundles the feed concentration, the removal rates, the yields and the two
responses, and rejects combinations in which a consumer can never break even.
"""

import dataclasses
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np

from .errors import CapabilityError, DomainError
from .helpers import NormalizedDict, lookup, registry_decorator

MAX_ORDER = 3

# Points used to sanity-check custom responses at construction.
_VALIDATION_GRID = np.geomspace(1e-4, 1e4, 41)

_RESPONSE_KINDS: NormalizedDict[str, type["Response"]] = NormalizedDict()


class Response(ABC):
    """
    Abstract functional response.

    Subclasses implement ``_evaluate(x, order)`` for ``order`` in 0..3 and
    ``supremum()``. Callers use ``eval(x, order)``, which validates arguments.
    """

    kind: ClassVar[str]

    register = staticmethod(registry_decorator(_RESPONSE_KINDS, "kind"))

    def eval(self, x: float, order: int = 0) -> float:
        """Return f(x), f'(x), f''(x) or f'''(x) for ``order`` 0, 1, 2 or 3."""
        if order not in range(MAX_ORDER + 1):
            raise ValueError(f"order must be one of 0..{MAX_ORDER}, got {order!r}")
        if x < 0:
            raise DomainError(f"Response evaluated at negative concentration x={x!r}")
        return self._evaluate(float(x), order)

    def __call__(self, x: float) -> float:
        return self.eval(x)

    @abstractmethod
    def _evaluate(self, x: float, order: int) -> float: ...

    @abstractmethod
    def supremum(self) -> float:
        """Return lim f(x) as x -> infinity."""

    @abstractmethod
    def to_config(self) -> dict[str, Any]: ...


class _RationalResponse(Response):
    """Shared validation and equality for the two Holling families."""

    def __init__(self, m: float, alpha: float):
        for name, value in (("m", m), ("alpha", alpha)):
            if not isinstance(value, (int, float)) or not value > 0:
                raise ValueError(f"{type(self).__name__}.{name} must be a positive number, "
                                 f"got {value!r}")
        self.m = float(m)
        self.alpha = float(alpha)

    def supremum(self) -> float:
        return self.m

    def to_config(self) -> dict[str, Any]:
        return {"kind": self.kind, "m": self.m, "alpha": self.alpha}

    def __eq__(self, other):
        return type(other) is type(self) and (self.m, self.alpha) == (other.m, other.alpha)

    def __hash__(self):
        return hash((type(self).__name__, self.m, self.alpha))

    def __repr__(self):
        return f"{type(self).__name__}(m={self.m!r}, alpha={self.alpha!r})"


@Response.register("holling2")
class HollingII(_RationalResponse):
    """Michaelis-Menten uptake ``m x / (alpha + x)``."""

    def _evaluate(self, x: float, order: int) -> float:
        m, a = self.m, self.alpha
        s = a + x
        match order:
            case 0:
                return m * x / s
            case 1:
                return m * a / s**2
            case 2:
                return -2.0 * m * a / s**3
            case _:
                return 6.0 * m * a / s**4


@Response.register("holling3")
class HollingIII(_RationalResponse):
    """Sigmoidal uptake ``m x^2 / (alpha + x^2)``."""

    def _evaluate(self, x: float, order: int) -> float:
        m, a = self.m, self.alpha
        x2 = x * x
        s = a + x2
        match order:
            case 0:
                return m * x2 / s
            case 1:
                return 2.0 * m * a * x / s**2
            case 2:
                return 2.0 * m * a * (a - 3.0 * x2) / s**3
            case _:
                return -24.0 * m * a * x * (a - x2) / s**4


class CustomResponse(Response):
    """
    Response built from user supplied callables.

    Args:
        evaluators: ``[f, f', f'', f''']``; trailing derivatives may be omitted.
            Asking for a missing order raises ``CapabilityError``.
        sup: Declared supremum of ``f``.
        name: Label used in reprs and configs.

    The constructor samples ``f`` on a log-spaced grid and rejects curves that
    do not start at zero, are not increasing or exceed ``sup``.
    """

    kind = "custom"

    def __init__(self, evaluators: Sequence[Callable[[float], float]], sup: float,
                 name: str = "custom"):
        if not 1 <= len(evaluators) <= MAX_ORDER + 1:
            raise ValueError(f"evaluators must hold 1..{MAX_ORDER + 1} callables, "
                             f"got {len(evaluators)}")
        if not sup > 0:
            raise ValueError(f"sup must be positive, got {sup!r}")
        self._evaluators = tuple(evaluators)
        self._sup = float(sup)
        self.name = name
        self._validate_shape()

    def _validate_shape(self) -> None:
        f = self._evaluators[0]
        if not math.isclose(f(0.0), 0.0, abs_tol=1e-14):
            raise ValueError(f"{self.name}: f(0) must be 0, got {f(0.0)!r}")
        values = np.array([f(x) for x in _VALIDATION_GRID])
        if np.any(np.diff(values) <= 0):
            raise ValueError(f"{self.name}: response is not strictly increasing")
        if np.any(values >= self._sup):
            raise ValueError(f"{self.name}: response reaches its declared supremum {self._sup}")

    def _evaluate(self, x: float, order: int) -> float:
        if order >= len(self._evaluators):
            raise CapabilityError(f"{self.name} does not provide derivative order {order}")
        return float(self._evaluators[order](x))

    def supremum(self) -> float:
        return self._sup

    def to_config(self) -> dict[str, Any]:
        return {"kind": self.kind, "name": self.name, "sup": self._sup}

    def __repr__(self):
        return f"CustomResponse(name={self.name!r}, sup={self._sup!r})"


def response_from_config(config: Mapping[str, Any]) -> Response:
    """Build a registered response from ``{"kind": ..., "m": ..., "alpha": ...}``."""
    if not isinstance(config, Mapping):
        raise TypeError(f"Response config must be a mapping, got {type(config).__name__}")
    cls = lookup(_RESPONSE_KINDS, config.get("kind"), label="response kind")
    extra = set(config) - {"kind", "m", "alpha"}
    if extra:
        raise ValueError(f"Unknown response fields: {sorted(extra)}")
    return cls(config.get("m"), config.get("alpha"))


def response_kinds() -> list[str]:
    return sorted(_RESPONSE_KINDS.keys())


@dataclass(frozen=True, kw_only=True)
class Parameters:
    """
    Full parameterization of the chemostat system.

    ``D1``/``D2`` default to ``D``. Construction fails when a rate is not
    positive, ``mu`` is negative, or a consumer cannot break even
    (``gamma1 * sup(f1) <= D1`` or ``gamma2 * sup(f2) <= D2``).
    """

    mu: float
    D: float
    D1: float | None = None
    D2: float | None = None
    gamma1: float
    gamma2: float
    f1: Response
    f2: Response

    def __post_init__(self):
        if self.D1 is None:
            object.__setattr__(self, "D1", self.D)
        if self.D2 is None:
            object.__setattr__(self, "D2", self.D)

        if not self.mu >= 0:
            raise ValueError(f"mu must be >= 0, got {self.mu!r}")
        for name in ("D", "D1", "D2", "gamma1", "gamma2"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        for name in ("f1", "f2"):
            if not isinstance(getattr(self, name), Response):
                raise TypeError(f"{name} must be a Response, got {getattr(self, name)!r}")

        if not self.gamma1 * self.f1.supremum() > self.D1:
            raise ValueError(
                f"gamma1*sup(f1) = {self.gamma1 * self.f1.supremum()!r} must exceed "
                f"D1 = {self.D1!r} (washout due to an inadequate resource)"
            )
        if not self.gamma2 * self.f2.supremum() > self.D2:
            raise ValueError(
                f"gamma2*sup(f2) = {self.gamma2 * self.f2.supremum()!r} must exceed "
                f"D2 = {self.D2!r} (inadequate prey)"
            )

    @property
    def equal_removal(self) -> bool:
        """True when ``D = D1 = D2``."""
        return self.D1 == self.D and self.D2 == self.D

    @property
    def d_hat(self) -> float:
        return min(self.D, self.D1, self.D2)

    def with_mu(self, mu: float) -> "Parameters":
        return dataclasses.replace(self, mu=float(mu))

    def with_removal(self, D1: float, D2: float) -> "Parameters":
        return dataclasses.replace(self, D1=float(D1), D2=float(D2))

    def to_config(self) -> dict[str, Any]:
        return {
            "mu": self.mu,
            "D": self.D,
            "D1": self.D1,
            "D2": self.D2,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "f1": self.f1.to_config(),
            "f2": self.f2.to_config(),
        }
