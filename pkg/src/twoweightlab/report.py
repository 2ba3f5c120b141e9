"""Deterministic report rows, CSV/JSON writers, and small fit helpers.

CSV bodies contain no timestamps and fixed column orders, so identical
configurations reproduce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .enclosure import Enclosure, qstr


@dataclass
class BoundReport:
    quantity: str
    value: object
    reference: object = None
    ratio: float | None = None
    trend: float | None = None
    verdict: str = "report-only"
    details: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {"quantity": self.quantity, "value": fmt(self.value),
                "reference": fmt(self.reference), "ratio": fmt(self.ratio),
                "trend": fmt(self.trend), "verdict": self.verdict,
                **{k: fmt(v) for k, v in sorted(self.details.items())}}


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Enclosure):
        if value.is_exact:
            return qstr(value.lo)
        return f"{qstr(value.lo)}..{qstr(value.hi)}"
    if isinstance(value, Fraction):
        return qstr(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, bool):
        return str(value)
    return str(value)


def fit_loglog_slope(xs: list[float], ys: list[float]) -> float:
    """Least-squares slope of log y against log x."""
    if len(xs) < 2:
        raise ValueError("need at least two points")
    lx = [math.log(v) for v in xs]
    ly = [math.log(v) for v in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    den = sum((a - mx) ** 2 for a in lx)
    return sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / den


def fit_slope(xs: list[float], ys: list[float]) -> float:
    """Least-squares slope of y against x (no logs)."""
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    den = sum((a - mx) ** 2 for a in xs)
    return sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / den


def logspace(lo: float, hi: float, n: int) -> list[float]:
    if not (0 < lo < hi) or n < 2:
        raise ValueError("need 0 < lo < hi and n >= 2")
    a, b = math.log10(lo), math.log10(hi)
    return [10 ** (a + (b - a) * i / (n - 1)) for i in range(n)]


def write_csv(path: Path, rows: list[dict], columns: list[str] | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if columns is None:
        columns = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore",
                                lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: fmt(row.get(k)) if not isinstance(row.get(k), str)
                             else row[k] for k in columns})


def write_json(path: Path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    def default(obj):
        if isinstance(obj, Enclosure):
            return {"lo": qstr(obj.lo), "hi": qstr(obj.hi)}
        if isinstance(obj, Fraction):
            return qstr(obj)
        if isinstance(obj, Path):
            return str(obj)
        raise TypeError(f"cannot serialize {type(obj)}")

    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=default)
        fh.write("\n")
