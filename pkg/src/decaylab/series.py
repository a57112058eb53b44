"""Norm-vs-time series and their CSV serialisation.

CSV layout: ``t,l2_sq[,h{s}_sq...][,lin_l2_sq,diff_l2_sq]`` with numbers
written at 17 significant digits so files round-trip bit-exactly through
float parsing.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from os import PathLike
from typing import Any

import numpy as np


def _format_s(s: float) -> str:
    return f"{s:g}"


def norm_column_name(s: float) -> str:
    return "l2_sq" if s == 0.0 else f"h{_format_s(s)}_sq"


@dataclass
class NormTimeSeries:
    """Squared norms sampled on an ascending time axis.

    ``norms_sq`` maps derivative order ``s`` to an array aligned with
    ``times``; order 0 is always present.
    """

    times: np.ndarray
    norms_sq: dict[float, np.ndarray]
    metadata: dict[str, Any] = dataclass_field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=np.float64)
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("sample times must be strictly ascending")
        if 0.0 not in self.norms_sq:
            raise ValueError("series must include the order-0 (L2) norms")
        for s, col in self.norms_sq.items():
            arr = np.asarray(col, dtype=np.float64)
            if arr.shape != self.times.shape:
                raise ValueError(f"column for s={s} does not match the time axis")
            self.norms_sq[s] = arr

    @property
    def orders(self) -> list[float]:
        return sorted(self.norms_sq)

    def column(self, s: float) -> np.ndarray:
        return self.norms_sq[s]

    def restricted(self, lo: float, hi: float) -> "NormTimeSeries":
        keep = (self.times >= lo) & (self.times <= hi)
        return NormTimeSeries(
            times=self.times[keep],
            norms_sq={s: col[keep] for s, col in self.norms_sq.items()},
            metadata=dict(self.metadata),
        )


def write_series_csv(
    path: str | PathLike,
    series: NormTimeSeries,
    extra: dict[str, np.ndarray] | None = None,
) -> None:
    """Write a series (plus optional aligned extra columns) to CSV."""
    headers = ["t"] + [norm_column_name(s) for s in series.orders]
    columns = [series.times] + [series.column(s) for s in series.orders]
    for name, col in (extra or {}).items():
        col = np.asarray(col, dtype=np.float64)
        if col.shape != series.times.shape:
            raise ValueError(f"extra column {name!r} does not match the time axis")
        headers.append(name)
        columns.append(col)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(headers) + "\n")
        for row in zip(*columns):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_series_csv(path: str | PathLike) -> tuple[NormTimeSeries, dict[str, np.ndarray]]:
    """Inverse of :func:`write_series_csv`; returns (series, extra columns)."""
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip()
        names = header.split(",")
        rows = [list(map(float, line.split(","))) for line in fh if line.strip()]
    data = np.asarray(rows, dtype=np.float64)
    if data.size == 0 or names[0] != "t":
        raise ValueError(f"{path}: not a series CSV")
    cols = {name: data[:, j] for j, name in enumerate(names)}
    norms: dict[float, np.ndarray] = {}
    extra: dict[str, np.ndarray] = {}
    for name, col in cols.items():
        if name == "t":
            continue
        if name == "l2_sq":
            norms[0.0] = col
        elif name.startswith("h") and name.endswith("_sq"):
            norms[float(name[1:-3])] = col
        else:
            extra[name] = col
    return NormTimeSeries(times=cols["t"], norms_sq=norms), extra


def geometric_sample_times(
    t_end: float, t0: float = 0.5, growth: float = 1.15, include_zero: bool = True
) -> np.ndarray:
    """Geometric schedule ``t0 * growth^j`` up to ``t_end`` (optionally with 0)."""
    if t_end <= 0.0 or t0 <= 0.0 or growth <= 1.0:
        raise ValueError("need t_end > 0, t0 > 0, growth > 1")
    times = []
    t = t0
    while t <= t_end * (1.0 + 1e-12):
        times.append(min(t, t_end))
        t *= growth
    if include_zero:
        times.insert(0, 0.0)
    return np.asarray(times, dtype=np.float64)
