"""Straight-line fits in log space and wealth-class detection.

All fits are unweighted least squares over occupied bins; empty bins are
dropped rather than regularized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .metrics import WealthHistogram

EXPONENTIAL = "exponential"
POWER_LAW = "power-law"
SCALING = "scaling"


@dataclass(frozen=True)
class FitResult:
    form: str
    p1: float  # prefactor C (or scaling prefactor)
    p2: float  # b, alpha, or scaling exponent
    range_lo: float
    range_hi: float
    residual: float
    n_points: int

    @property
    def params(self) -> tuple[float, float]:
        return self.p1, self.p2

    def csv_row(self) -> str:
        return f"{self.form},{self.range_lo:g},{self.range_hi:g},{self.p1:.10g},{self.p2:.10g},{self.residual:.10g}"


FIT_CSV_HEADER = "form,range_lo,range_hi,p1,p2,residual"

# Bulk exponential fits stop at this multiple of <w>; beyond it bins hold a
# handful of counts and their logs drag the slope.
BULK_SPAN = 5


def _line(x, y):
    slope, icept = np.polyfit(x, y, 1)
    resid = float(np.sum((y - (slope * x + icept)) ** 2))
    return float(slope), float(icept), resid


def _select(h: WealthHistogram, lo: float, hi: float, open_lo: bool = False):
    w, n = h.arrays()
    lower = w > lo if open_lo else w >= lo
    keep = lower & (w <= hi) & (n > 0)
    return w[keep].astype(float), n[keep].astype(float)


def fit_exponential(h: WealthHistogram, range_: tuple[float, float], mean_w: float) -> FitResult:
    """Fit ``n(w) = C exp(-w / (b <w>))``; ``p2`` is ``b`` in units of ``mean_w``."""
    lo, hi = range_
    w, n = _select(h, lo, hi)
    if len(w) < 3:
        raise ValueError(f"need >= 3 occupied bins in [{lo}, {hi}], got {len(w)}")
    slope, icept, resid = _line(w, np.log(n))
    if slope >= 0:
        b = math.inf
    else:
        b = -1.0 / (slope * mean_w)
    return FitResult(EXPONENTIAL, math.exp(icept), b, lo, hi, resid, len(w))


def fit_power_law(h: WealthHistogram, range_: tuple[float, float],
                  open_lo: bool = False) -> FitResult:
    """Fit ``n(w) = C / w^(1 + alpha)``; ``p2`` is ``alpha``.

    ``open_lo`` excludes the lower edge itself, for ranges like (2<w>, inf).
    """
    lo, hi = range_
    if lo < 0 or (lo == 0 and not open_lo):
        raise ValueError("power-law range must exclude w = 0")
    w, n = _select(h, lo, hi, open_lo)
    if len(w) < 2:
        raise ValueError(f"need >= 2 occupied bins in range, got {len(w)}")
    slope, icept, resid = _line(np.log(w), np.log(n))
    return FitResult(POWER_LAW, math.exp(icept), -slope - 1.0, lo, hi, resid, len(w))


def fit_scaling(points) -> FitResult:
    """Log-log fit ``t_c = A N^gamma`` over ``(N, t_c)`` pairs."""
    pts = list(points)
    if any(t is None for _, t in pts):
        raise ValueError("condensation not reached for some N")
    if any(t <= 0 for _, t in pts):
        raise ValueError("t_c must be positive")
    if len({n for n, _ in pts}) < 3:
        raise ValueError("need >= 3 distinct N values")
    x = np.log([float(n) for n, _ in pts])
    y = np.log([float(t) for _, t in pts])
    slope, icept, resid = _line(x, y)
    ns = [n for n, _ in pts]
    return FitResult(SCALING, math.exp(icept), slope, min(ns), max(ns), resid, len(pts))


def min_exchanges(mean_w: int, dw: int) -> int:
    """Fewest lost bets that can push a fresh agent below the stake."""
    if dw < 1:
        raise ValueError("dw must be >= 1")
    return mean_w // dw


@dataclass(frozen=True)
class ClassPeaks:
    peaks: list[tuple[float, float]]  # (wealth location, prominence as a fraction of agents)
    zero_class_mass: float

    @property
    def locations(self) -> list[float]:
        return [p for p, _ in self.peaks]


def detect_classes(h: WealthHistogram, mean_w: float, min_mass: float = 0.002,
                   zero_below: int | None = None, window: float = 0.1) -> ClassPeaks:
    """Wealth classes as prominent maxima of window-smoothed mass.

    Mass is box-smoothed over ``+-window * mean_w`` across all states, the
    zero class included, so near-zero agents merge into the zero peak. A
    maximum counts when its prominence is at least ``min_mass`` (a fraction
    of agents) and is located at the largest raw bin inside its window.
    Peaks located below ``zero_below + window * mean_w`` belong to the zero
    class; ``zero_below`` defaults to ``ceil(0.05 mean_w)``.
    """
    total = h.n
    if total == 0:
        return ClassPeaks([], 0.0)
    if zero_below is None:
        zero_below = math.ceil(0.05 * mean_w)
    w, n = h.arrays()
    zero_mass = float(n[w < zero_below].sum()) / total
    top = int(w.max())
    half = max(1, int(round(window * mean_w)))
    dense = np.zeros(top + 1)
    dense[w] = n
    csum = np.concatenate([[0.0], np.cumsum(dense)])
    idx = np.arange(top + 1)
    smooth = (csum[np.minimum(idx + half + 1, top + 1)] - csum[np.maximum(idx - half, 0)]) / total
    # pad so maxima at the edges are found too
    padded = np.concatenate([[0.0], smooth, [0.0]])
    found, props = find_peaks(padded, prominence=min_mass)
    peaks = []
    for k, prom in zip(found - 1, props["prominences"]):
        lo, hi = max(k - half, 0), min(k + half, top)
        loc = lo + int(np.argmax(dense[lo:hi + 1]))
        if loc < zero_below + half:
            continue
        peaks.append((float(loc), float(prom)))
    return ClassPeaks(peaks, zero_mass)
