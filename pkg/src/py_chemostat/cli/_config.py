"""
Run configuration: a single JSON document with a ``parameters`` block and an
optional ``options`` block. Every validation failure raises ``ConfigError``
whose message starts with the JSON path of the offending field.
"""

import dataclasses
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..errors import ChemostatError, ConfigError
from ..responses import Parameters, Response, response_from_config

_PARAMETER_KEYS = {"mu", "D", "D1", "D2", "gamma1", "gamma2", "f1", "f2"}


@dataclass(frozen=True)
class MuRange:
    lo: float
    hi: float
    n: int


@dataclass(frozen=True)
class Options:
    bracket: tuple[float, float] | None = None
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_end: float = 1000.0
    init: tuple[float, float, float] | None = None
    seed: int = 0
    sample_dt: float = 0.05
    transient_fraction: float = 0.5
    min_crossings: int = 4
    amp_floor: float = 1e-3
    radii: tuple[float, ...] = (0.1, 0.05, 0.025)
    samples_per_circle: int = 8
    mu_interval: tuple[float, float] | None = None
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    parameters: Parameters
    options: Options
    mu_range: MuRange | None = None

    def scalar_parameters(self) -> Parameters:
        """Parameters of a single-``mu`` run; a range is a config error here."""
        if self.mu_range is not None:
            raise ConfigError("parameters.mu", "this command needs a single number, not a range")
        return self.parameters

    def require_range(self) -> MuRange:
        if self.mu_range is None:
            raise ConfigError("parameters.mu", "this command needs a range {lo, hi, n}")
        return self.mu_range


def read_document(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(str(path), "file not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON ({exc})") from exc
    if not isinstance(document, dict):
        raise ConfigError("<root>", "expected a JSON object")
    return document


def _number(block: Mapping, key: str, path: str, default: Any = ...,
            positive: bool = False) -> float:
    if key not in block:
        if default is ...:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{path}.{key}", f"expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{path}.{key}", f"must be > 0, got {value!r}")
    return float(value)


def _integer(block: Mapping, key: str, path: str, default: int, minimum: int) -> int:
    value = block.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{path}.{key}", f"expected an integer >= {minimum}, got {value!r}")
    return value


def _numbers(block: Mapping, key: str, path: str, length: int | None) -> tuple[float, ...] | None:
    if key not in block:
        return None
    value = block[key]
    if not isinstance(value, list) or (length is not None and len(value) != length):
        expected = f"a list of {length} numbers" if length else "a list of numbers"
        raise ConfigError(f"{path}.{key}", f"expected {expected}, got {value!r}")
    return tuple(_number({"item": v}, "item", f"{path}.{key}[{i}]") for i, v in enumerate(value))


def _reject_unknown(block: Mapping, allowed: set[str], path: str) -> None:
    extra = sorted(set(block) - allowed)
    if extra:
        raise ConfigError(f"{path}.{extra[0]}", f"unknown field. Available: {sorted(allowed)}")


def _response(block: Mapping, key: str) -> Response:
    path = f"parameters.{key}"
    if key not in block:
        raise ConfigError(path, "missing required field")
    spec = block[key]
    if not isinstance(spec, Mapping):
        raise ConfigError(path, f"expected a JSON object, got {spec!r}")
    _reject_unknown(spec, {"kind", "m", "alpha"}, path)
    if "kind" not in spec:
        raise ConfigError(f"{path}.kind", "missing required field")
    constants = {name: _number(spec, name, path, positive=True) for name in ("m", "alpha")}
    try:
        return response_from_config({"kind": spec["kind"], **constants})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.kind", str(exc)) from exc


def _mu(block: Mapping) -> tuple[float, MuRange | None]:
    value = block.get("mu")
    if isinstance(value, Mapping):
        _reject_unknown(value, {"lo", "hi", "n"}, "parameters.mu")
        lo = _number(value, "lo", "parameters.mu")
        hi = _number(value, "hi", "parameters.mu")
        n = _integer(value, "n", "parameters.mu", default=0, minimum=2)
        if not lo < hi:
            raise ConfigError("parameters.mu", f"range needs lo < hi, got lo={lo!r}, hi={hi!r}")
        return lo, MuRange(lo, hi, n)
    return _number(block, "mu", "parameters"), None


def parse_parameters(block: Any) -> tuple[Parameters, MuRange | None]:
    if not isinstance(block, Mapping):
        raise ConfigError("parameters", "expected a JSON object")
    _reject_unknown(block, _PARAMETER_KEYS, "parameters")
    mu, mu_range = _mu(block)
    values = {
        "mu": mu,
        "D": _number(block, "D", "parameters", positive=True),
        "D1": _number(block, "D1", "parameters", default=None, positive=True),
        "D2": _number(block, "D2", "parameters", default=None, positive=True),
        "gamma1": _number(block, "gamma1", "parameters", positive=True),
        "gamma2": _number(block, "gamma2", "parameters", positive=True),
        "f1": _response(block, "f1"),
        "f2": _response(block, "f2"),
    }
    try:
        return Parameters(**values), mu_range
    except (ChemostatError, ValueError, TypeError) as exc:
        raise ConfigError("parameters", str(exc)) from exc


def parse_options(block: Any) -> Options:
    if block is None:
        return Options()
    if not isinstance(block, Mapping):
        raise ConfigError("options", "expected a JSON object")
    allowed = {f.name for f in dataclasses.fields(Options)}
    _reject_unknown(block, allowed, "options")
    defaults = Options()
    path = "options"

    bracket = _numbers(block, "bracket", path, 2)
    if bracket is not None and not bracket[0] < bracket[1]:
        raise ConfigError("options.bracket", f"needs lo < hi, got {list(bracket)!r}")
    init = _numbers(block, "init", path, 3)
    if init is not None and (min(init) < 0 or not init[0] > 0):
        raise ConfigError("options.init", f"needs N0 > 0 and P0, Z0 >= 0, got {list(init)!r}")
    radii = _numbers(block, "radii", path, None)
    if radii is not None and (not radii or min(radii) <= 0):
        raise ConfigError("options.radii", f"needs positive radii, got {list(radii)!r}")
    mu_interval = _numbers(block, "mu_interval", path, 2)
    if mu_interval is not None and not mu_interval[0] < mu_interval[1]:
        raise ConfigError("options.mu_interval", f"needs lo < hi, got {list(mu_interval)!r}")
    transient = _number(block, "transient_fraction", path, defaults.transient_fraction)
    if not 0 <= transient < 1:
        raise ConfigError("options.transient_fraction", f"must be in [0, 1), got {transient!r}")

    return Options(
        bracket=bracket,
        rel_tol=_number(block, "rel_tol", path, defaults.rel_tol, positive=True),
        abs_tol=_number(block, "abs_tol", path, defaults.abs_tol, positive=True),
        t_end=_number(block, "t_end", path, defaults.t_end, positive=True),
        init=init,
        seed=_integer(block, "seed", path, defaults.seed, minimum=0),
        sample_dt=_number(block, "sample_dt", path, defaults.sample_dt, positive=True),
        transient_fraction=transient,
        min_crossings=_integer(block, "min_crossings", path, defaults.min_crossings, minimum=2),
        amp_floor=_number(block, "amp_floor", path, defaults.amp_floor, positive=True),
        radii=radii if radii is not None else defaults.radii,
        samples_per_circle=_integer(block, "samples_per_circle", path,
                                    defaults.samples_per_circle, minimum=1),
        mu_interval=mu_interval,
        workers=_integer(block, "workers", path, defaults.workers, minimum=1),
    )


def parse_config(document: Mapping[str, Any]) -> RunConfig:
    _reject_unknown(document, {"parameters", "options"}, "<root>")
    if "parameters" not in document:
        raise ConfigError("parameters", "missing required field")
    parameters, mu_range = parse_parameters(document["parameters"])
    return RunConfig(parameters, parse_options(document.get("options")), mu_range)


def with_overrides(config: RunConfig, **overrides: Any) -> RunConfig:
    """Replace options with the non-None ``overrides`` (command-line flags win)."""
    changes = {key: value for key, value in overrides.items() if value is not None}
    for key, value in changes.items():
        if key in {"rel_tol", "abs_tol", "t_end"} and not value > 0:
            raise ConfigError(f"options.{key}", f"must be > 0, got {value!r}")
        if key in {"seed", "workers"} and value < (1 if key == "workers" else 0):
            raise ConfigError(f"options.{key}", f"out of range: {value!r}")
    return dataclasses.replace(config, options=dataclasses.replace(config.options, **changes))
