"""Canonical CSV output and the bundled reader.

Values are written with shortest-exact float formatting so files are
byte-stable for a fixed seed and round-trip losslessly through the
reader. Curve files share one schema; the variance check has its own
(documented in the README).
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence

ADVANTAGE_HEADER = ("grid", "gamma", "mean_adv", "stderr_adv", "theory_adv", "gen_error")
VARIANCE_HEADER = ("grid", "gamma", "arm", "var_emp", "var_theory")


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    f = float(v)
    if math.isnan(f):
        return ""
    return repr(f)


def write_rows(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row width {len(row)} does not match header {header}")
            writer.writerow([format_value(v) for v in row])


def read_rows(path: str | Path) -> tuple[list[str], list[dict]]:
    """Read a CSV written by write_rows; empty cells come back as None."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = []
        for raw in reader:
            rows.append(
                {k: (float(v) if v != "" else None) for k, v in zip(header, raw)}
            )
    return header, rows
