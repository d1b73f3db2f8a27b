"""Poisson approximation of the coherence distribution at finite n.

The events {|correlation of pair (i,j)| > t} are pairwise independent and
identically distributed, so the count of exceedances is approximately
Poisson with mean

    lambda = (p (p - 1) / 2) * P(|rho| > t),

giving P(coherence <= t) close to exp(-lambda) with an explicit, fully
finite-n error bound. Because lambda uses the exact tail probability rather
than any asymptotic, this is usually the sharpest approximation available at
desk-scale n, and the limit laws are its n -> infinity shadows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ShapeError
from .exact import CorrLaw, tail_integral, tail_prob

__all__ = ["PoissonApprox", "poisson_approx", "h_n_value"]

# the approximation is advertised as unreliable past this bound size
_ACCURACY_BOUND = 0.05


@dataclass(frozen=True)
class PoissonApprox:
    """P(coherence <= t) ~ exp(-lambda) with a rigorous error bound.

    ``error_bound`` sums the two per-term bounds 32 lambda^2 / p and is
    multiplied by 1/lambda when lambda > 1, as the underlying inequality
    allows. ``h_n`` is the companion diagnostic integral whose convergence
    certifies the approximation's asymptotic validity; ``accuracy_flag`` is
    set when the bound itself exceeds 0.05 and the approximation should not
    be trusted unaided.
    """

    t: float
    lam: float
    prob: float
    error_bound: float
    h_n: float
    accuracy_flag: bool
    n: int
    p: int
    centered: bool


def poisson_approx(n: int, p: int, t: float, centered: bool = True) -> PoissonApprox:
    """Poisson approximation of P(coherence <= t) for an n-by-p matrix."""
    if p < 2:
        raise ShapeError(f"need p >= 2, got p={p}")
    law = CorrLaw(n, centered=centered)
    if law.dof < 1:
        raise ShapeError("need n >= 3 centered or n >= 2 uncentered")
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"need t in [0, 1], got {t}")
    lam = 0.5 * p * (p - 1) * tail_prob(law, t)
    bound = 64.0 * lam * lam / p
    if lam > 1.0:
        bound /= lam
    return PoissonApprox(
        t=float(t),
        lam=float(lam),
        prob=math.exp(-lam),
        error_bound=float(bound),
        h_n=h_n_value(n, p, t, centered=centered),
        accuracy_flag=bound > _ACCURACY_BOUND,
        n=n,
        p=p,
        centered=centered,
    )


def h_n_value(n: int, p: int, t: float, centered: bool = True) -> float:
    """The diagnostic integral sqrt(n) p^2 / sqrt(2 pi) * integral_t^1 (1-x^2)^((nu-2)/2) dx.

    Tracks lambda up to a factor that tends to 1 as n and p grow; a finite
    limit of this quantity certifies the exp(-lambda) approximation. The
    integral is evaluated exactly through the incomplete-beta closed form.
    """
    nu = n - 2 if centered else n - 1
    if nu < 1:
        raise ShapeError("need n >= 3 centered or n >= 2 uncentered")
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"need t in [0, 1], got {t}")
    return float(math.sqrt(n) * p * p / math.sqrt(2.0 * math.pi) * tail_integral(nu - 2, t))
