"""Autocorrelation, the i.i.d. filter, and discrete PMF convolution."""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, InvalidParams
from .preprocess import first_difference
from .trace import TimingTrace


def autocorr(series, lag: int = 1) -> float:
    r"""Sample autocorrelation at ``lag``.

    .. math::

       r(\ell) = \frac{\sum_{i=1}^{n-\ell}(x_i-\bar x)(x_{i+\ell}-\bar x)}
                      {\sum_{i=1}^{n}(x_i-\bar x)^2}

    A zero-variance series returns 1.0: perfect regularity is treated as
    maximal correlation.
    """
    if lag < 1:
        raise ValueError("lag must be a positive integer")
    x = np.asarray(series, dtype=np.float64)
    if x.size < lag + 2:
        raise InsufficientData(f"autocorrelation at lag {lag} needs at least {lag + 2} values")
    d = x - x.mean()
    den = float(d @ d)
    if den == 0.0:
        return 1.0
    r = float(d[:-lag] @ d[lag:]) / den
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class FilterConfig:
    lag: int = 1
    band_z: float = 1.96
    min_samples: int = 64

    def __post_init__(self):
        if self.lag < 1:
            raise InvalidParams("lag must be positive")
        if self.min_samples < 1 or self.lag >= self.min_samples:
            raise InvalidParams("need 0 < lag < min_samples")
        if not self.band_z > 0:
            raise InvalidParams("band_z must be positive")

    def iid_band(self, n: int) -> float:
        """White-noise significance half-width for ``n`` samples."""
        return self.band_z / np.sqrt(n)


@dataclass(frozen=True)
class FilterOutcome:
    forward: bool
    r: float
    band: float

    @property
    def pass_normal(self) -> bool:
        return not self.forward


def iid_filter(trace: TimingTrace, config: FilterConfig = FilterConfig()) -> FilterOutcome:
    """First detection stage: is the interval series plausibly i.i.d.?

    Traces whose lag autocorrelation sits inside the white-noise band pass
    as normal; everything else is forwarded with its ``r`` attached.
    """
    if len(trace) < config.min_samples:
        raise InsufficientData(
            f"trace has {len(trace)} events; the i.i.d. filter needs {config.min_samples}"
        )
    gaps = first_difference(trace).values
    r = autocorr(gaps, config.lag)
    band = config.iid_band(gaps.size)
    return FilterOutcome(forward=not abs(r) < band, r=r, band=band)


class Pmf:
    """Finite probability mass function over integer atoms."""

    __slots__ = ("support", "probs")

    def __init__(self, support, probs, atol: float = 1e-9):
        s = np.asarray(support, dtype=np.int64)
        p = np.asarray(probs, dtype=np.float64)
        if s.ndim != 1 or s.shape != p.shape or s.size == 0:
            raise ValueError("support and probs must be matching non-empty 1-D sequences")
        if np.any(np.diff(s) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > atol:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        s.setflags(write=False)
        p.setflags(write=False)
        self.support = s
        self.probs = p

    @classmethod
    def uniform(cls, atoms):
        atoms = np.asarray(sorted(atoms), dtype=np.int64)
        return cls(atoms, np.full(atoms.size, 1.0 / atoms.size))

    @classmethod
    def point(cls, atom: int):
        return cls([atom], [1.0])

    def as_dict(self) -> dict:
        return dict(zip(self.support.tolist(), self.probs.tolist()))

    def prob(self, atom: int) -> float:
        i = np.searchsorted(self.support, atom)
        if i < self.support.size and self.support[i] == atom:
            return float(self.probs[i])
        return 0.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(self.support, size=size, p=self.probs)

    def __repr__(self):
        return f"Pmf({self.as_dict()!r})"


def convolve_pmf(p: Pmf, q: Pmf) -> Pmf:
    """Exact distribution of X + Y for independent X ~ p, Y ~ q.

    The support is the Minkowski sum of the two supports; atoms reached by
    several pairs accumulate their mass.
    """
    sums = np.add.outer(p.support, q.support).ravel()
    mass = np.multiply.outer(p.probs, q.probs).ravel()
    atoms, inverse = np.unique(sums, return_inverse=True)
    probs = np.bincount(inverse, weights=mass, minlength=atoms.size)
    return Pmf(atoms, probs)


def empirical_pmf(samples) -> Pmf:
    atoms, counts = np.unique(np.asarray(samples, dtype=np.int64), return_counts=True)
    return Pmf(atoms, counts / counts.sum())


def total_variation(p: Pmf, q: Pmf) -> float:
    atoms = np.union1d(p.support, q.support)
    pa = np.array([p.prob(a) for a in atoms])
    qa = np.array([q.prob(a) for a in atoms])
    return 0.5 * float(np.abs(pa - qa).sum())


def lag_profile(series, max_lag: int) -> np.ndarray:
    """Autocorrelation at lags 1..max_lag (for plotting)."""
    return np.array([autocorr(series, lag) for lag in range(1, max_lag + 1)])
