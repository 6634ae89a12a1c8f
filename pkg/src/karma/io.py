"""CSV ingestion/output and harmonic covariates."""
import csv
import math

import numpy as np

from .kuma import Bounds
from .model import SeriesData


class CsvError(ValueError):
    pass


def load_csv(path, bounds: Bounds = Bounds(), rescale: float = 1.0):
    """Read ``t,y[,x1,...]`` into a :class:`SeriesData`.

    Every column other than ``t`` and ``y`` is a covariate, in file order.
    Values of ``y`` are divided by ``rescale`` and must lie in ``[a, b]``.
    Returns ``(data, t)``.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise CsvError(f"{path}: empty file") from None
        if "y" not in header:
            raise CsvError(f"{path}: header must contain a 'y' column, got {header}")
        iy = header.index("y")
        it = header.index("t") if "t" in header else None
        ix = [i for i, h in enumerate(header) if h not in ("t", "y")]
        ys, ts, xs = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise CsvError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                ys.append(float(row[iy]) / rescale)
                ts.append(float(row[it]) if it is not None else float(len(ts) + 1))
                xs.append([float(row[i]) for i in ix])
            except ValueError as exc:
                raise CsvError(f"{path}: line {lineno}: {exc}") from None
    y = np.array(ys)
    bad = np.flatnonzero(~((y >= bounds.a) & (y <= bounds.b)))
    if bad.size:
        i = bad[0]
        raise CsvError(f"{path}: row {i + 1} (line {i + 2}): y = {float(y[i])!r} outside "
                       f"[{bounds.a}, {bounds.b}]")
    X = np.array(xs, dtype=float).reshape(len(ys), len(ix))
    return SeriesData(y, X), np.array(ts)


def _fmt(v):
    return format(float(v), ".17g")


def write_csv(path, data: SeriesData, t=None, x_names=None):
    """Write ``t,y,x1..`` with 17 significant digits (round-trips exactly)."""
    t = np.arange(1, data.n + 1) if t is None else np.asarray(t)
    names = x_names or [f"x{l + 1}" for l in range(data.X.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "y"] + list(names))
        for i in range(data.n):
            tt = int(t[i]) if float(t[i]).is_integer() else _fmt(t[i])
            w.writerow([tt, _fmt(data.y_tilde[i])] + [_fmt(v) for v in data.X[i]])


def write_columns(path, columns: dict):
    keys = list(columns)
    n = len(columns[keys[0]])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(keys)
        for i in range(n):
            w.writerow([v[i] if isinstance(v[i], (int, np.integer)) else _fmt(v[i])
                        for v in (columns[k] for k in keys)])


def harmonic_covariates(n_total: int, period: int = 12, start: int = 1) -> np.ndarray:
    """Rows (sin(2 pi t/period), cos(2 pi t/period)) for t = start .. start + n_total - 1."""
    if period < 2:
        raise ValueError("period must be at least 2")
    t = np.arange(start, start + n_total, dtype=float)
    w = 2.0 * math.pi * t / period
    return np.column_stack([np.sin(w), np.cos(w)])
