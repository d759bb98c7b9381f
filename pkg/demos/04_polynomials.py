"""
Least squares and the shape of a fit
====================================

The second stage fits a polynomial and asks one question of it: does the
derivative keep a single sign over (0, 1)?
"""

import numpy as np

from blacklining import Polynomial, fit_poly, monotonic_on, poly_sub

# noiseless samples give the coefficients back
rng = np.random.default_rng(4)
true = rng.uniform(-5, 5, 6)
xs = np.linspace(0, 1, 64)
fit, residual = fit_poly(xs, Polynomial(true)(xs), 5, full=True)
print("max coefficient error %.1e, residual %.1e" % (np.abs(fit.coeffs - true).max(), residual))

# integer arithmetic stays exact; interior zeros survive
p = Polynomial([6626, 4135, 8264, 1592, 2662, 361, 30, 2])
q = Polynomial([908, 536, 0, 271, 67, 10, 1])
print("p - q =", poly_sub(p, q).coeffs.tolist())
print("p' =", p.derivative().coeffs.tolist())

for name, poly, (a, b) in (
    ("x^3", Polynomial([0, 0, 0, 1]), (0, 1)),
    ("x^2", Polynomial([0, 0, 1]), (-1, 1)),
    ("1 - x", Polynomial([1, -1]), (0, 1)),
    ("p", p, (0, 1)),
):
    v = monotonic_on(poly, a, b, eps=0)
    print("%-6s on (%g, %g): %-14s f' in [%.3g, %.3g]"
          % (name, a, b, v.kind.value, v.min_derivative, v.max_derivative))
