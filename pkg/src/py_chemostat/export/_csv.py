"""CSV writers used by ``py_chemostat.export``.

Floats are written with ``repr`` (shortest round-trip form) and rows end with
``\\n``, so reruns of the same config are byte-identical.
"""

import csv
from collections.abc import Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], path: Path) -> None:
    """Write a header row followed by one line per row."""
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(col)) for col in columns])


def write_document(document: Mapping[str, Any], path: Path) -> None:
    """Write a flat mapping as ``key,value`` rows."""
    if not isinstance(document, Mapping):
        raise TypeError(f"CSV documents must be flat mappings, got {type(document).__name__}")
    write_rows([{"key": k, "value": v} for k, v in document.items()], ["key", "value"], path)
