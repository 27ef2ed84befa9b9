"""Result rows and their CSV form (RFC 4180, 17 significant digits)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

HEADER = ("experiment", "params", "metric", "value", "regime", "sampled_sup", "truncation")


def fmt(v) -> str:
    """Deterministic text for a CSV cell; reals get 17 significant digits."""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    if v is None:
        return ""
    return str(v)


def fmt_param(v) -> str:
    """Parameter labels use the shortest round-tripping repr (2.1, not 2.1000000000000001)."""
    if isinstance(v, float) and math.isfinite(v):
        return repr(v).removesuffix(".0") if v.is_integer() else repr(v)
    return fmt(v)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    params: tuple[tuple[str, object], ...]
    metric: str
    value: float
    regime: str = "paper"
    sampled_sup: bool = False
    truncation: int | None = None

    def param(self, key: str):
        return dict(self.params)[key]

    def cells(self) -> list[str]:
        p = ";".join(f"{k}={fmt_param(v)}" for k, v in self.params)
        return [
            self.experiment,
            p,
            self.metric,
            fmt(float(self.value)),
            self.regime,
            fmt(self.sampled_sup),
            fmt(self.truncation),
        ]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(HEADER)
    for row in rows:
        w.writerow(row.cells())
    return buf.getvalue()


def table_to_csv(header, records) -> str:
    """Generic CSV for CLI subcommands: ``records`` is a list of value tuples."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for rec in records:
        w.writerow([fmt(v) for v in rec])
    return buf.getvalue()


def parse_params(text: str) -> dict[str, str]:
    out = {}
    for part in text.split(";"):
        if part:
            k, v = part.split("=", 1)
            out[k] = v
    return out


def read_rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
