"""Slow reference implementations used as oracles by the fast library code."""

import math

import numpy as np


def naive_pearson(x: np.ndarray, y: np.ndarray, centered: bool = True) -> float:
    """Textbook two-pass correlation of two columns, O(n) and unvectorized."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if centered:
        x = x - x.mean()
        y = y - y.mean()
    num = float(np.dot(x, y))
    den = math.sqrt(float(np.dot(x, x)) * float(np.dot(y, y)))
    return num / den


def naive_coherence(data: np.ndarray, centered: bool = True):
    """Double loop over all column pairs; returns (value, (i, j)) 1-based."""
    n, p = data.shape
    best = -1.0
    best_pair = None
    for i in range(p):
        for j in range(i + 1, p):
            r = abs(naive_pearson(data[:, i], data[:, j], centered))
            if r > best:
                best = r
                best_pair = (i + 1, j + 1)
    return min(best, 1.0), best_pair


def quad_cdf(law, x: float) -> float:
    """Density quadrature for the correlation CDF, singularity-safe.

    Substituting rho = sin(theta) turns the (1 - rho^2) ** ((nu - 2) / 2)
    endpoint behavior into a smooth integrand for every nu >= 1.
    """
    from scipy.integrate import quad

    from cohlaw import pdf

    if x <= -1.0:
        return 0.0
    if x >= 1.0:
        return 1.0

    def integrand(theta):
        s = math.sin(theta)
        return pdf(law, s) * math.cos(theta)

    value, _ = quad(integrand, -math.pi / 2.0, math.asin(x), limit=200)
    return value
