"""Deterministic artifact writing.

CSV files carry a '#'-prefixed comment preamble, then a header row, then
data rows. Bytes are stable across reruns with the same configuration:
writes go through a temp file and an atomic replace, newlines are always
'\\n', and floats print via repr (shortest round-trip form) unless a
display rounding is requested.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

__all__ = [
    "atomic_write_text",
    "fmt_full",
    "fmt_sig2",
    "fmt_alert_display",
    "fmt_accuracy_display",
    "truncate_thousandths",
    "write_csv",
    "read_csv",
    "CsvDocument",
]


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write text so readers never observe a half-written file."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent,
                                    prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return target


def fmt_full(value: float | int) -> str:
    if isinstance(value, bool):  # bool is an int; never wanted here
        raise TypeError("boolean has no numeric formatting")
    if isinstance(value, int):
        return repr(value)
    return repr(float(value))


def fmt_sig2(value: float) -> str:
    return format(value, ".2g")


def _strip(text: str) -> str:
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"


def fmt_alert_display(value: float) -> str:
    """Nine decimals with trailing zeros dropped."""
    return _strip(f"{value:.9f}")


def truncate_thousandths(value: float) -> float:
    """Chop (not round) to 3 decimals; tolerates 1e-9 of float jitter."""
    if value < 0:
        raise ValueError("display truncation expects non-negative values")
    return math.floor(value * 1000.0 + 1e-9) / 1000.0


def fmt_accuracy_display(value: float) -> str:
    return _strip(f"{truncate_thousandths(value):.3f}")


@dataclass(frozen=True)
class CsvDocument:
    comments: tuple[str, ...]
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


def write_csv(path: str | Path, header: Sequence[str],
              rows: Sequence[Sequence[str]],
              comments: Sequence[str] = ()) -> Path:
    cells = [header, *rows]
    for row in cells:
        for cell in row:
            if "," in cell or "\n" in cell or "#" in cell:
                raise ValueError(f"cell needs quoting, refusing: {cell!r}")
    lines = [f"# {line}" if line else "#" for line in comments]
    lines += [",".join(row) for row in cells]
    return atomic_write_text(path, "\n".join(lines) + "\n")


def read_csv(path: str | Path) -> CsvDocument:
    comments: list[str] = []
    table: list[tuple[str, ...]] = []
    with open(path, encoding="utf-8", newline="") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith("#"):
                comments.append(line[1:].strip())
            elif line:
                table.append(tuple(line.split(",")))
    if not table:
        raise ValueError(f"{path}: no header row")
    return CsvDocument(comments=tuple(comments), header=table[0],
                       rows=tuple(table[1:]))
