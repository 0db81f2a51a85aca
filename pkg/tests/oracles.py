"""Independent numerical oracles used to freeze expected test values.

These deliberately avoid the library's own code paths: the normal CDF is
a Taylor series for erf, and quantiles come from bisection against that
series. Accuracy is comfortably below 1e-10 for |z| <= 5, which covers
every probability the tests probe.
"""
from __future__ import annotations

import numpy as np

_SQRT_PI = 1.7724538509055160273


def erf_series(x):
    """erf via its Maclaurin series, vectorized; accurate for |x| <= ~3.5."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    term = x.copy()  # (-1)^n x^(2n+1) / n!, starting at n = 0
    for n in range(1, 160):
        total += term / (2 * n - 1)
        term = term * (-(x * x)) / n
    return (2.0 / _SQRT_PI) * total


def oracle_normal_cdf(z):
    z = np.asarray(z, dtype=float)
    return 0.5 + 0.5 * erf_series(z / np.sqrt(2.0))


def oracle_normal_quantile(p):
    """Bisection against the series CDF; |z| <= 6 covers p in [1e-9, 1-1e-9]."""
    p = np.asarray(p, dtype=float)
    lo = np.full_like(p, -6.0)
    hi = np.full_like(p, 6.0)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = oracle_normal_cdf(mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)
