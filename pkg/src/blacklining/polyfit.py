"""Dense polynomials, least-squares fitting, and a derivative-sign scan."""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegreeTooHigh, InvalidInterval, RankDeficient


class Polynomial:
    """Polynomial with ascending coefficients: ``coeffs[j]`` multiplies ``x**j``.

    Trailing zeros are trimmed on construction, so equal polynomials have
    equal coefficient vectors; the zero polynomial is ``[0]``. Interior
    zero coefficients are kept as-is.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if c.dtype.kind not in "iuf":
            c = c.astype(np.float64)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1].copy() if nz.size else np.zeros(1, dtype=c.dtype)
        c.setflags(write=False)
        self._coeffs = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        return self._coeffs.size - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self._coeffs)

    def __sub__(self, other):
        return poly_sub(self, other)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self):
        return hash(tuple(self._coeffs.tolist()))

    def __repr__(self):
        return f"Polynomial({self._coeffs.tolist()!r})"

    def derivative(self):
        return derivative(self)


def fit_poly(xs, ys, degree: int, full: bool = False):
    """Least-squares polynomial fit of ``ys`` against ``xs``.

    Solved by a QR decomposition of the column-equilibrated Vandermonde
    matrix rather than the normal equations, which square its condition
    number. With ``full=True`` returns ``(poly, residual_norm)``.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("xs and ys must be 1-D sequences of equal length")
    if degree < 0 or int(degree) != degree:
        raise ValueError("degree must be a non-negative integer")
    degree = int(degree)
    if degree + 1 > x.size:
        raise DegreeTooHigh(f"degree {degree} needs at least {degree + 1} points, got {x.size}")
    if np.unique(x).size < degree + 1:
        raise RankDeficient(f"degree {degree} needs {degree + 1} distinct abscissae")

    V = np.vander(x, degree + 1, increasing=True)
    scale = np.linalg.norm(V, axis=0)
    scale[scale == 0] = 1.0
    Q, R = np.linalg.qr(V / scale, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.min() <= diag.max() * x.size * np.finfo(float).eps:
        raise RankDeficient("Vandermonde system is numerically rank deficient")
    coeffs = solve_triangular(R, Q.T @ y) / scale
    poly = Polynomial(coeffs)
    if full:
        return poly, float(np.linalg.norm(V @ coeffs - y))
    return poly


def poly_sub(p: Polynomial, q: Polynomial) -> Polynomial:
    n = max(p.coeffs.size, q.coeffs.size)
    a = np.zeros(n, dtype=np.result_type(p.coeffs, q.coeffs))
    a[: p.coeffs.size] += p.coeffs
    a[: q.coeffs.size] -= q.coeffs
    return Polynomial(a)


def derivative(p: Polynomial) -> Polynomial:
    c = p.coeffs
    if c.size == 1:
        return Polynomial([0])
    return Polynomial(c[1:] * np.arange(1, c.size, dtype=c.dtype))


class Monotonicity(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    FLAT = "flat"
    NON_MONOTONIC = "non_monotonic"

    @property
    def is_monotone(self) -> bool:
        return self is not Monotonicity.NON_MONOTONIC


@dataclass(frozen=True)
class MonotonicityVerdict:
    kind: Monotonicity
    min_derivative: float
    max_derivative: float


def scan_grid(a: float, b: float, grid_points: int) -> np.ndarray:
    """Midpoints of ``grid_points`` equal cells over [a, b]."""
    step = (b - a) / grid_points
    return a + step * (np.arange(grid_points) + 0.5)


def monotonic_on(
    p: Polynomial, a: float = 0.0, b: float = 1.0, eps: float = 1e-3, grid_points: int = 1024
) -> MonotonicityVerdict:
    """Classify ``p`` on (a, b) by the sign of ``p'`` on a uniform grid.

    The grid sits half a step inside each endpoint. ``eps`` is the slack
    allowed before a derivative counts as having the wrong sign; a
    derivative within ``eps`` of zero everywhere is FLAT.
    """
    if not a < b:
        raise InvalidInterval(f"need a < b, got ({a}, {b})")
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    d = derivative(p)(scan_grid(a, b, grid_points))
    lo, hi = float(d.min()), float(d.max())
    inc, dec = lo >= -eps, hi <= eps
    if inc and dec:
        kind = Monotonicity.FLAT
    elif inc:
        kind = Monotonicity.INCREASING
    elif dec:
        kind = Monotonicity.DECREASING
    else:
        kind = Monotonicity.NON_MONOTONIC
    return MonotonicityVerdict(kind, lo, hi)
