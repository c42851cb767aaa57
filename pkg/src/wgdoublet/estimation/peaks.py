"""Extremum detection on dB traces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels


@dataclass(frozen=True)
class Peak:
    f: float
    height_db: float
    width_estimate: float
    index: int
    prominence_db: float


def smooth_db(s21_db, points: int) -> np.ndarray:
    """Moving average of linear power over ``points`` samples (edge-padded), back in dB."""
    y = np.asarray(s21_db, dtype=np.float64)
    if points <= 1:
        return y
    if points % 2 == 0:
        points += 1
    power = 10.0 ** (y / 10.0)
    half = points // 2
    padded = np.pad(power, half, mode="edge")
    avg = np.convolve(padded, np.ones(points) / points, mode="valid")
    return 10.0 * np.log10(avg)


def _crossing(f, y, i, level, direction):
    j = i
    n = y.size
    while 0 <= j + direction < n:
        k = j + direction
        if y[k] <= level:
            # linear interpolation between j (above) and k (at/below)
            t = (y[j] - level) / (y[j] - y[k])
            return f[j] + t * (f[k] - f[j])
        j = k
    return None


def find_peaks(
    f,
    s21_db,
    min_prominence_db: float = 3.0,
    extremum: str = "peak",
    smooth: int = 1,
    backend: str | None = None,
) -> list[Peak]:
    """Local maxima (or minima for ``extremum="dip"``) with enough prominence.

    Flat tops report their lowest-frequency sample. Widths come from the
    linearly interpolated 3 dB crossings; with only one crossing the width is
    twice that half width, with none it falls back to one grid step.
    """
    f = np.asarray(f, dtype=np.float64)
    y = np.asarray(s21_db, dtype=np.float64)
    if f.shape != y.shape or f.ndim != 1:
        raise ValueError("frequency and trace must be 1-D arrays of equal length")
    if f.size > 1 and not np.all(np.diff(f) > 0):
        raise ValueError("frequency axis must be increasing")
    if extremum not in ("peak", "dip"):
        raise ValueError(f"extremum must be 'peak' or 'dip', got {extremum!r}")
    ys = smooth_db(y, smooth)
    if extremum == "dip":
        ys = -ys
    idx, prom = kernels.peak_scan(ys, min_prominence_db, backend=backend)
    step = float(np.min(np.diff(f))) if f.size > 1 else 1.0
    out = []
    for i, p in zip(idx, prom):
        level = ys[i] - 3.0
        lo = _crossing(f, ys, i, level, -1)
        hi = _crossing(f, ys, i, level, +1)
        if lo is not None and hi is not None:
            width = hi - lo
        elif lo is not None:
            width = 2.0 * (f[i] - lo)
        elif hi is not None:
            width = 2.0 * (hi - f[i])
        else:
            width = step
        height = -ys[i] if extremum == "dip" else ys[i]
        out.append(Peak(float(f[i]), float(height), float(max(width, step)), int(i), float(p)))
    return out
