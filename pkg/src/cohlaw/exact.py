"""Exact finite-sample distribution of a single correlation coefficient.

For matrices whose columns are i.i.d. from any spherical distribution, the
correlation of one column pair has a universal law depending only on the row
count n. With nu = n - 2 degrees of freedom in the centered case (nu = n - 1
uncentered), the density on (-1, 1) is

    C(nu) * (1 - rho^2)^((nu - 2) / 2),
    C(nu) = Gamma((nu + 1) / 2) / (sqrt(pi) * Gamma(nu / 2)),

equivalently rho^2 ~ Beta(1/2, nu/2). All CDF work routes through the
regularized incomplete beta function, which handles the integrable endpoint
singularity at nu = 1 and scales to n around 10^6 without quadrature.

Special small-sample cases (centered): two rows give a symmetric two-point
law on {-1, +1}; three rows the arcsine-type density; four rows the uniform
law; five rows the semicircle. The uncentered law at n rows equals the
centered law at n + 1 rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import betainc, betaincinv, betaln, gammaln

from .errors import DiscreteLawError, DomainError, ParameterError

__all__ = [
    "CorrLaw",
    "pdf",
    "cdf",
    "tail_prob",
    "tail_quantile",
    "tail_integral",
    "TailAsymptotic",
    "tail_integral_asymptotic",
    "gamma_ratio",
    "gamma_ratio_asymptotic",
    "SmallSampleLaw",
    "small_n_law",
]


@dataclass(frozen=True)
class CorrLaw:
    """The correlation law for n rows, centered or not."""

    n: int
    centered: bool = True

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 2):
            raise ParameterError(f"need integer n >= 2, got {self.n}")

    @property
    def dof(self) -> int:
        """Degrees of freedom nu: n - 2 centered, n - 1 uncentered."""
        return self.n - 2 if self.centered else self.n - 1


def _require_continuous(law: CorrLaw):
    if law.dof < 1:
        raise DiscreteLawError(
            "the centered two-row correlation is the two-point law on {-1, +1}; "
            "use small_n_law(2) for it"
        )


def pdf(law: CorrLaw, rho) -> float | np.ndarray:
    """Density of the correlation at ``rho``; requires |rho| < 1.

    Evaluated in log space so it stays finite for n of order 10^6.
    """
    _require_continuous(law)
    r = np.asarray(rho, dtype=np.float64)
    if np.any(np.abs(r) >= 1.0):
        raise DomainError("pdf requires |rho| < 1 (density diverges or vanishes at the endpoints)")
    nu = law.dof
    log_c = gammaln((nu + 1) / 2.0) - gammaln(nu / 2.0) - 0.5 * math.log(math.pi)
    out = np.exp(log_c + ((nu - 2) / 2.0) * np.log1p(-r * r))
    return float(out) if np.isscalar(rho) else out


def cdf(law: CorrLaw, x) -> float | np.ndarray:
    """P(correlation <= x). Clamps x outside [-1, 1] to the endpoints.

    Uses the Beta(1/2, nu/2) law of rho^2, splitting at zero so both tails
    keep full relative accuracy.
    """
    xx = np.asarray(x, dtype=np.float64)
    if law.centered and law.n == 2:
        out = np.where(xx < -1.0, 0.0, np.where(xx < 1.0, 0.5, 1.0))
        return float(out) if np.isscalar(x) else out
    nu = law.dof
    xc = np.clip(xx, -1.0, 1.0)
    half_mass = 0.5 * betainc(0.5, nu / 2.0, xc * xc)
    out = np.where(xc >= 0.0, 0.5 + half_mass, 0.5 - half_mass)
    return float(out) if np.isscalar(x) else out


def tail_prob(law: CorrLaw, t) -> float | np.ndarray:
    """P(|correlation| > t) for t in [0, 1].

    Computed as the complementary incomplete-beta in the swapped-parameter
    form, which evaluates the tiny tails without cancellation:
    P(rho^2 > t^2) = I_{1 - t^2}(nu/2, 1/2).
    """
    tt = np.asarray(t, dtype=np.float64)
    if np.any((tt < 0.0) | (tt > 1.0)):
        raise DomainError("tail_prob requires t in [0, 1]")
    if law.centered and law.n == 2:
        out = np.where(tt < 1.0, 1.0, 0.0)
        return float(out) if np.isscalar(t) else out
    nu = law.dof
    out = betainc(nu / 2.0, 0.5, (1.0 - tt) * (1.0 + tt))
    return float(out) if np.isscalar(t) else out


def tail_quantile(law: CorrLaw, tail: float) -> float:
    """The threshold t in [0, 1] with P(|correlation| > t) = tail."""
    if not (0.0 < tail <= 1.0):
        raise DomainError("tail probability must lie in (0, 1]")
    _require_continuous(law)
    x = betaincinv(law.dof / 2.0, 0.5, tail)
    return float(np.sqrt(max(0.0, 1.0 - x)))


def tail_integral(m: int | float, t: float) -> float:
    """Exact integral of (1 - x^2)^(m/2) over [t, 1] via the beta closed form."""
    if not (0.0 <= t <= 1.0):
        raise DomainError("tail_integral requires t in [0, 1]")
    a = (m + 2) / 2.0
    return float(0.5 * np.exp(betaln(a, 0.5)) * betainc(a, 0.5, (1.0 - t) * (1.0 + t)))


@dataclass(frozen=True)
class TailAsymptotic:
    """Closed-form tail approximation with its validity flag.

    ``low_accuracy`` is set when m * t^2 < 10, the regime where the
    approximation's relative error is no longer small; callers that need
    guarantees should switch to :func:`tail_integral`.
    """

    value: float
    low_accuracy: bool

    def __float__(self) -> float:
        return self.value


def tail_integral_asymptotic(m: int, t: float) -> TailAsymptotic:
    """Approximate integral of (1 - x^2)^(m/2) over [t, 1] for large m * t^2.

    Returns (1 / (m t)) * (1 - t^2)^((m + 2) / 2), evaluated through logs so
    it underflows gracefully rather than rounding to zero prematurely.
    """
    if m < 1:
        raise ParameterError(f"need m >= 1, got {m}")
    if not (0.0 < t < 1.0):
        raise DomainError("tail_integral_asymptotic requires t in (0, 1)")
    log_val = ((m + 2) / 2.0) * math.log1p(-t * t) - math.log(m) - math.log(t)
    return TailAsymptotic(value=math.exp(log_val), low_accuracy=(m * t * t < 10.0))


def gamma_ratio(n: int) -> float:
    """Gamma((n-1)/2) / Gamma((n-2)/2), exact via log-gamma."""
    if n < 3:
        raise ParameterError(f"need n >= 3, got {n}")
    return float(np.exp(gammaln((n - 1) / 2.0) - gammaln((n - 2) / 2.0)))


def gamma_ratio_asymptotic(n: int) -> float:
    """The large-n companion sqrt(n / 2) for cross-checking gamma_ratio."""
    return math.sqrt(n / 2.0)


@dataclass(frozen=True)
class SmallSampleLaw:
    """Named closed-form law of the centered correlation for n in 2..5."""

    name: str
    n: int
    sample: Callable[[int, int], np.ndarray]
    cdf: Callable[[np.ndarray], np.ndarray]
    pdf: Callable[[np.ndarray], np.ndarray] | None


def _sphere_sampler(n: int):
    """Sampler of the centered correlation law via its Beta(1/2, nu/2) square."""
    nu = n - 2

    def sample(count: int, seed: int) -> np.ndarray:
        gen = np.random.Generator(
            np.random.Philox(key=np.random.SeedSequence(seed).generate_state(2, np.uint64))
        )
        signs = np.where(gen.random(count) < 0.5, -1.0, 1.0)
        if nu < 1:
            return signs
        return signs * np.sqrt(gen.beta(0.5, nu / 2.0, size=count))

    return sample


def small_n_law(n: int) -> SmallSampleLaw:
    """The closed-form centered correlation law for n in {2, 3, 4, 5}.

    2 rows: symmetric two-point law on {-1, +1}. 3 rows: density
    1/(pi sqrt(1 - r^2)) (the square follows the arcsine law on [0, 1]).
    4 rows: uniform on [-1, 1]. 5 rows: semicircle density (2/pi) sqrt(1 - r^2).
    """
    if n not in (2, 3, 4, 5):
        raise ParameterError(f"closed-form small-sample laws cover n in 2..5, got {n}")
    law = CorrLaw(n, centered=True)
    if n == 2:
        return SmallSampleLaw(
            name="two-point",
            n=2,
            sample=_sphere_sampler(2),
            cdf=lambda x: cdf(law, x),
            pdf=None,
        )
    names = {3: "arcsine-type", 4: "uniform", 5: "semicircle"}
    closed_cdf = {
        3: lambda x: 0.5 + np.arcsin(np.clip(x, -1, 1)) / np.pi,
        4: lambda x: np.clip((np.asarray(x, dtype=float) + 1.0) / 2.0, 0.0, 1.0),
        5: lambda x: 0.5
        + (
            np.clip(x, -1, 1) * np.sqrt(1.0 - np.clip(x, -1, 1) ** 2)
            + np.arcsin(np.clip(x, -1, 1))
        )
        / np.pi,
    }
    return SmallSampleLaw(
        name=names[n],
        n=n,
        sample=_sphere_sampler(n),
        cdf=closed_cdf[n],
        pdf=lambda r, _law=law: pdf(_law, r),
    )
