from collections import UserDict
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from typing import Any, Generic, TypeVar


class StrAutoEnum(StrEnum):
    """
    StrEnum that automatically assigns values based on the enum member name
    if using auto() (from enum import auto). Values will then be lowercased strings
    of the member names. Used for classifications written to CSV/JSON artifacts.
    """

    @staticmethod
    def _generate_next_value_(name, start, count, last_values):
        return name.lower()


K = TypeVar("K")
V = TypeVar("V")


class NormalizedDict(UserDict, Generic[K, V]):
    """
    Used for all dicts keyed by user supplied names (response kinds, subcommands).
    Normalizes keys to lowercase stripped strings (both for setting/getting items).
    """

    @staticmethod
    def normalize_item(key: K, raise_error: bool = False) -> str | Any:
        """
        Normalize keys to lowercase strings. If raise_error is False will return
        the original key without raising if original key is not a string.
        """
        try:
            return key.strip().lower()
        except AttributeError as exc:
            if raise_error:
                raise TypeError(f"Keys must be strings, got {type(key).__name__}: {key!r}") from exc
            return key

    def __getitem__(self, key: K) -> V:
        return super().__getitem__(self.normalize_item(key))

    def __setitem__(self, key: K, value: V) -> None:
        super().__setitem__(self.normalize_item(key, raise_error=True), value)

    def __delitem__(self, key: K) -> None:
        super().__delitem__(self.normalize_item(key))

    def __contains__(self, key: K) -> bool:
        return super().__contains__(self.normalize_item(key))


def registry_decorator(registry: NormalizedDict, attr_name: str) -> Callable:
    """
    Build a ``register(name)`` decorator that stores the decorated object in
    ``registry`` under ``name`` and tags it with ``attr_name`` = name.
    Registering the same name twice is an error.
    """

    def register(name: str) -> Callable:
        def decorator(obj):
            if name in registry:
                raise ValueError(f"'{name}' is already registered to {registry[name]!r}.")
            setattr(obj, attr_name, NormalizedDict.normalize_item(name, raise_error=True))
            registry[name] = obj
            return obj

        return decorator

    return register


def lookup(registry: NormalizedDict, name: str, label: str):
    """Fetch ``name`` from ``registry`` or raise ValueError listing what is available."""
    try:
        return registry[name]
    except (KeyError, TypeError) as exc:
        raise ValueError(
            f"Invalid {label}: {name!r}. Available: {sorted(registry.keys())}"
        ) from exc


def parallel_map(func: Callable, items, workers: int = 1) -> list:
    """``list(map(func, items))``, on a thread pool when ``workers > 1``. Order is preserved."""
    if not isinstance(workers, int) or workers < 1:
        raise ValueError(f"workers must be a positive integer, got {workers!r}")
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
