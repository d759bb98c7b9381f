"""Feature extraction: min-max normalization, differencing, step distances."""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, InsufficientData
from .trace import IntervalSeries, TimingTrace


@dataclass(frozen=True)
class NormalizedSeries:
    values: np.ndarray
    original_min: float
    original_max: float
    degenerate: bool = False

    def __len__(self):
        return int(self.values.size)


@dataclass(frozen=True)
class DistanceSeries:
    values: np.ndarray

    def __len__(self):
        return int(self.values.size)


def normalize(series) -> NormalizedSeries:
    """Affine min-max map onto [0, 1].

    A constant series has no scale to map; it becomes all zeros and is
    flagged ``degenerate``.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("cannot normalize an empty series")
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        values, degenerate = np.zeros_like(x), True
    else:
        values, degenerate = (x - lo) / (hi - lo), False
        # pin the extremes exactly; rounding can leave 1 - 1ulp
        values[x == hi] = 1.0
    values.setflags(write=False)
    return NormalizedSeries(values, lo, hi, degenerate)


def first_difference(trace: TimingTrace) -> IntervalSeries:
    if len(trace) < 2:
        raise InsufficientData("first difference needs at least 2 events")
    return IntervalSeries(np.diff(trace.timestamps).astype(np.float64))


def euclidean_distances(series: NormalizedSeries) -> DistanceSeries:
    """Distances between consecutive points ``(i/(n-1), values[i])``."""
    y = np.asarray(series.values, dtype=np.float64)
    n = y.size
    if n < 2:
        raise InsufficientData("distance series needs at least 2 points")
    step = 1.0 / (n - 1)
    return DistanceSeries(np.hypot(step, np.diff(y)))
