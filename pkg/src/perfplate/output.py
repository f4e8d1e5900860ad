"""Tabular emission in CSV, JSON and aligned text.

Every table carries a provenance block (input echo, units, time convention,
library version). Floats are written in scientific notation with nine
significant digits so that CSV output round-trips and is byte-stable.
"""

import io
import json
import math
from typing import Dict, List, Sequence

from . import __version__

__all__ = ["SCHEMA_VERSION", "Table", "provenance", "render"]

SCHEMA_VERSION = "perfplate.table/1"
TIME_CONVENTION = "exp(-i omega t)"


def provenance(command: str, inputs, units: Dict[str, str]) -> dict:
    return {
        "library": "perfplate",
        "version": __version__,
        "command": command,
        "time_convention": TIME_CONVENTION,
        "units": dict(units),
        "inputs": inputs,
    }


class Table:
    """Named columns, rows as dicts, and free-form summary entries."""

    def __init__(self, columns: Sequence[str], rows: List[dict], prov: dict, summary=None):
        self.columns = list(columns)
        self.rows = rows
        self.provenance = prov
        self.summary = dict(summary or {})


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.8e}"
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, complex):
        return {"re": _jsonable(v.real), "im": _jsonable(v.imag)}
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return _jsonable(v.item())
    return v


def _csv(table: Table) -> str:
    out = io.StringIO()
    prov = table.provenance
    out.write(f"# perfplate {prov['version']} {prov['command']}\n")
    out.write(f"# time convention: {prov['time_convention']}\n")
    out.write("# units: " + ", ".join(f"{k}={v}" for k, v in prov["units"].items()) + "\n")
    out.write("# inputs: " + json.dumps(_jsonable(prov["inputs"]), sort_keys=True, separators=(",", ":")) + "\n")
    for k, v in table.summary.items():
        out.write(f"# {k}: {_fmt(v)}\n")
    out.write(",".join(table.columns) + "\n")
    for row in table.rows:
        out.write(",".join(_fmt(row.get(c)) for c in table.columns) + "\n")
    return out.getvalue()


def _json(table: Table) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "provenance": table.provenance,
        "columns": table.columns,
        "rows": [{c: r.get(c) for c in table.columns} for r in table.rows],
        "summary": table.summary,
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def _pretty(table: Table) -> str:
    prov = table.provenance
    lines = [
        f"perfplate {prov['version']}  {prov['command']}  (time convention {prov['time_convention']})",
        "units: " + ", ".join(f"{k}={v}" for k, v in prov["units"].items()),
    ]
    cells = [[_pretty_cell(r.get(c)) for c in table.columns] for r in table.rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(table.columns)]
    lines.append("  ".join(c.rjust(w) for c, w in zip(table.columns, widths)))
    for row in cells:
        lines.append("  ".join(v.rjust(w) for v, w in zip(row, widths)))
    for k, v in table.summary.items():
        lines.append(f"{k}: {_pretty_cell(v)}")
    return "\n".join(lines) + "\n"


def _pretty_cell(v) -> str:
    if isinstance(v, float) and math.isfinite(v):
        return f"{v:.6g}"
    return _fmt(v)


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return _csv(table)
    if fmt == "json":
        return _json(table)
    if fmt == "pretty":
        return _pretty(table)
    raise ValueError(f"unknown output format {fmt!r}")
