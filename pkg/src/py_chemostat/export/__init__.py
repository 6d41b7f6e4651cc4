"""Artifact writers for py-chemostat runs.

Two entry points:

* ``export_rows``: emit a table (one mapping per row), e.g. a scan or a
  trajectory.
* ``export_document``: emit a single structured document, e.g. a Hopf
  certificate or a verification report.

The format dispatch below routes ``file_format`` to a private sibling module
(``_csv`` or ``_json``). Each handler module exposes
``write_rows(rows, columns, path)`` and ``write_document(document, path)``.
"""

from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from types import ModuleType
from typing import Any

from ..helpers import NormalizedDict
from . import _csv, _json

__all__ = ["export_rows", "export_document", "to_jsonable"]

to_jsonable = _json.to_jsonable

# File extension → handler module.
_FORMAT_HANDLERS: dict[str, ModuleType] = {
    ".csv": _csv,
    ".json": _json,
}


def export_rows(
    rows: Iterable[Mapping[str, Any]],
    out_file_path: str | Path,
    columns: Sequence[str] | None = None,
    file_format: str = ".csv",
) -> Path:
    """Write ``rows`` to ``out_file_path``.

    Args:
        rows: Mappings from column name to value.
        out_file_path: File path to write to. Parent directory is created if
            missing. A path without suffix gets the ``file_format`` extension;
            a different suffix raises ``ValueError``.
        columns: Column order. ``None`` uses the keys of the first row. Every
            entry must be a key of the rows; otherwise a ``ValueError`` lists
            the valid columns.
        file_format: ``".csv"`` (default) or ``".json"``. Case-insensitive;
            the leading dot is optional.

    Returns:
        The path written to (with any defaulted extension applied).
    """
    fmt, handler = _resolve_format(file_format)
    path = _resolve_path(out_file_path, fmt)

    rows = [dict(row) for row in rows]
    available = list(rows[0]) if rows else []
    if columns is None:
        columns = available
    else:
        columns = list(columns)
        if rows:
            _validate_membership(columns, available, label="column")

    handler.write_rows(rows, columns, path)
    return path


def export_document(
    document: Any,
    out_file_path: str | Path,
    file_format: str = ".json",
) -> Path:
    """Write one structured ``document`` (dataclass, mapping, ...) to ``out_file_path``.

    Path and format handling follow ``export_rows``.
    """
    fmt, handler = _resolve_format(file_format)
    path = _resolve_path(out_file_path, fmt)
    handler.write_document(document, path)
    return path


# --- Internal helpers --------------------------------------------------------


def _resolve_format(file_format: str) -> tuple[str, ModuleType]:
    """Resolve ``file_format`` (with or without leading dot, any case) to
    its canonical lower-case ``.ext`` and the handler module that writes
    that format. Raises ``ValueError`` for unsupported formats."""
    fmt = file_format.lower()
    if not fmt.startswith("."):
        fmt = "." + fmt
    if fmt not in _FORMAT_HANDLERS:
        raise ValueError(
            f"Unsupported file_format {file_format!r}. Supported: {sorted(_FORMAT_HANDLERS)}"
        )
    return fmt, _FORMAT_HANDLERS[fmt]


def _resolve_path(out_file_path: str | Path, fmt: str) -> Path:
    path = Path(out_file_path)
    if path.suffix == "":
        path = path.with_suffix(fmt)
    elif path.suffix.lower() != fmt:
        raise ValueError(
            f"out_file_path suffix {path.suffix!r} does not match file_format {fmt!r}."
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _validate_membership(requested: Iterable[str], allowed: Iterable[str], label: str) -> None:
    """Raise ``ValueError`` if any item in ``requested`` is not in ``allowed``.
    Comparison normalizes via ``NormalizedDict.normalize_item``."""
    allowed_set = {NormalizedDict.normalize_item(a) for a in allowed}
    invalid = [r for r in requested if NormalizedDict.normalize_item(r) not in allowed_set]
    if invalid:
        raise ValueError(f"Invalid {label}(s): {invalid}.\nValid: {sorted(allowed_set)}")
