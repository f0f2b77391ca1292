"""Tabular results and their CSV / JSON serialization.

CSV layout: ``# key=value`` metadata lines, a header row, then data rows.
Floats are written with 17 significant digits and lines end in ``\\n`` so that
identical inputs give byte-identical files.
"""
from __future__ import annotations

import functools
import io
import json
import math
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .. import __version__
from ..kernels import BACKEND


@functools.lru_cache(maxsize=1)
def build_id() -> str:
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=5, check=True)
        describe = out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        describe = "unknown"
    return f"{__version__}+{describe}"


@dataclass
class Table:
    columns: Sequence[str]
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        i = list(self.columns).index(name)
        return [r[i] for r in self.rows]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    if hasattr(value, "item"):  # numpy scalar
        return _cell(value.item())
    text = str(value)
    if any(c in text for c in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def full_metadata(table: Table) -> dict:
    meta = {"build": build_id(), "kernels": BACKEND}
    meta.update(table.metadata)
    return meta


def to_csv(table: Table) -> str:
    buf = io.StringIO(newline="")
    for key, value in full_metadata(table).items():
        buf.write(f"# {key}={_cell(value)}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _json_value(value):
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def to_json(table: Table) -> str:
    doc = {
        "metadata": {k: _json_value(v) for k, v in full_metadata(table).items()},
        "columns": list(table.columns),
        "rows": [[_json_value(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def render(table: Table, fmt: str = "csv") -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"unknown format {fmt!r}")


def write(table: Table, path, fmt: str = "csv") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render(table, fmt))
