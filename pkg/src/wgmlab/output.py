"""Deterministic CSV / JSON writers.

Numbers are written with repr() (shortest round-trip form, '.' decimal,
no grouping) and files use LF line endings. Writes go through a temporary
file in the target directory so a failure never leaves a partial file.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

SCAN_HEADER = ("position_um", "coupling", "broadening_GHz", "shift_GHz")
LLCURVE_HEADER = ("pump_rate_per_s", "n_mean", "rho")


def num(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(num(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def write_json(path: str | Path, payload) -> None:
    write_atomic(path, json.dumps(payload, indent=2, allow_nan=False) + "\n")


SCAN_COLUMNS = [
    {"name": "position_um", "label": "mesa position", "unit": "um"},
    {"name": "coupling", "label": "relative coupling", "unit": ""},
    {"name": "broadening_GHz", "label": "resonance broadening", "unit": "GHz"},
    {"name": "shift_GHz", "label": "resonance shift magnitude", "unit": "GHz"},
]
LLCURVE_COLUMNS = [
    {"name": "pump_rate_per_s", "label": "pump rate per dot", "unit": "1/s"},
    {"name": "n_mean", "label": "mean intracavity photon number", "unit": ""},
    {"name": "rho", "label": "upper-state occupation", "unit": ""},
]


def emit_plot_data(kind: str, rows: list, path: str | Path, extra: dict | None = None) -> tuple[Path, Path]:
    """Write a plottable CSV plus a sidecar JSON with column labels and units.

    kind is "scan" or "llcurve". Both files are removed if either write fails.
    """
    if kind == "scan":
        header, columns = SCAN_HEADER, SCAN_COLUMNS
    elif kind == "llcurve":
        header, columns = LLCURVE_HEADER, LLCURVE_COLUMNS
    else:
        raise ValueError(f"unknown plot data kind {kind!r}")
    if not rows:
        raise ValueError("cannot emit plot data for an empty curve")
    path = Path(path)
    meta_path = sidecar_path(path)
    meta = {"kind": kind, "data": path.name, "x": columns[0]["name"], "columns": columns}
    if extra:
        meta["parameters"] = extra
    write_atomic(path, csv_text(header, rows))
    try:
        write_json(meta_path, meta)
    except BaseException:
        path.unlink(missing_ok=True)
        raise
    return path, meta_path
