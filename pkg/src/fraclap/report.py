"""Reports produced by the command-line front end and their CSV/JSON forms."""

import csv
import io
import json
import math
from dataclasses import dataclass, field

__all__ = ["Report", "EXACT", "emit", "to_json", "to_csv", "from_json"]

# bound marker for values that are exact by construction
EXACT = "exact"


def _plain(v):
    """Convert numpy scalars and arrays into JSON-native values."""
    if hasattr(v, "tolist"):
        return v.tolist()
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    columns: list = field(default_factory=list)
    results: list = field(default_factory=list)
    bounds: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    duration_ms: float = None
    error: str = None

    def add_row(self, values, bounds=None):
        """Append a result row; ``bounds`` maps numeric columns to error bounds or EXACT."""
        for k in values:
            if k not in self.columns:
                self.columns.append(k)
        self.results.append(dict(values))
        self.bounds.append(dict(bounds or {}))

    def as_dict(self):
        out = {
            "command": self.command,
            "inputs": _plain(self.inputs),
            "results": _plain(self.results),
            "bounds": _plain(self.bounds),
            "verdicts": _plain(self.verdicts),
            "duration_ms": self.duration_ms,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


def to_json(report):
    # repr-based float rendering is the shortest string that parses back to
    # the same double, so a round trip is bit-exact
    return json.dumps(report.as_dict(), indent=2, sort_keys=False, allow_nan=True) + "\n"


def from_json(text):
    return json.loads(text)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return str(_plain(v))


def to_csv(report):
    bounded = [c for c in report.columns if any(c in b for b in report.bounds)]
    header = list(report.columns) + [f"{c}_bound" for c in bounded]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for row, bnd in zip(report.results, report.bounds):
        w.writerow([_cell(row.get(c)) for c in report.columns] + [_cell(bnd.get(c)) for c in bounded])
    return buf.getvalue()


def emit(report, fmt):
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    raise ValueError(f"unknown format {fmt!r}")
