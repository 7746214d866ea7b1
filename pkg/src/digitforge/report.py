"""CSV / JSON serialization of command reports."""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__

# columns that may hold arbitrarily large integers; always written as strings
BIG_COLUMNS = {"Q", "R", "gcd", "value", "Q_f", "Q_g"}
DECIMAL_COLUMNS = {"ratio", "frequency", "max_ratio", "max_deviation", "chi_square"}


@dataclass
class Report:
    command: str
    columns: list
    rows: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def _decimal(x) -> str:
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.6f" % x


def _json_value(col, v):
    if v is None:
        return None
    if col in DECIMAL_COLUMNS:
        return _decimal(v)
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return str(v) if col in BIG_COLUMNS else v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return _decimal(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(None, x) for x in v]
    return str(v) if not isinstance(v, (str, dict)) else v


def _csv_value(col, v) -> str:
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_value(None, x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    j = _json_value(col, v)
    return j if isinstance(j, str) else str(j)


def serialize(report: Report, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)  # RFC 4180: CRLF line ends, minimal quoting
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_csv_value(c, row.get(c)) for c in report.columns])
        return buf.getvalue()
    if fmt == "json":
        meta = {"command": report.command,
                "parameters": {k: _json_value(k, v) for k, v in report.parameters.items()},
                "version": __version__}
        meta.update({k: _json_value(k, v) for k, v in report.extra.items()})
        rows = [{c: _json_value(c, row.get(c)) for c in report.columns} for row in report.rows]
        return json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n"
    raise ValueError("unknown format %r" % fmt)
