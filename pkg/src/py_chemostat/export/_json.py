"""JSON writers used by ``py_chemostat.export``."""

import dataclasses
import json
import math
from collections.abc import Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np


def to_jsonable(obj: Any) -> Any:
    """
    Convert results into plain JSON values: dataclasses and mappings become
    objects, enums their value, numpy scalars and arrays Python numbers and
    lists, complex numbers ``{"re": .., "im": ..}`` and non-finite floats
    ``None``. Objects with ``to_config()`` (responses, parameters) use it.
    """
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if hasattr(obj, "to_config"):
        return to_jsonable(obj.to_config())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(item) for item in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Sequence):
        return [to_jsonable(item) for item in obj]
    raise TypeError(f"Cannot convert {type(obj).__name__} to JSON: {obj!r}")


def write_document(document: Any, path: Path) -> None:
    text = json.dumps(to_jsonable(document), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")


def write_rows(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], path: Path) -> None:
    write_document([{col: row.get(col) for col in columns} for row in rows], path)
