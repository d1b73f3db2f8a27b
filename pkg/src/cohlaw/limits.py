"""Limiting distributions of the coherence and the pivotal transforms.

How fast the column count p grows against the row count n selects one of
four asymptotic regimes, each with its own centering of the coherence and a
parameter-free limit law:

* sub-exponential, log(p)/sqrt(n) -> 0: the statistic
  n*T + 4*log(p) - log(log(p)) with T = log(1 - L^2) has limit
  F(y) = 1 - exp(-K0 * e^(y/2)), K0 = 1/sqrt(8*pi).
* transitional, log(p)/sqrt(n) -> a: the statistic n*L^2 - 4*log(p) +
  log(log(p)) has the classical double-exponential limit shifted left by
  8*a^2.
* exponential, log(p)/n -> b: same statistic as sub-exponential, limit
  1 - exp(-K(b) * e^((y + 8b)/2)) with K(b) = sqrt(b / (2*pi*(1 - e^(-4b)))).
* super-exponential, log(p)/n -> infinity: n*T + (4n/(n-2))*log(p) - log(n)
  (uncentered: 4n/(n-1)) has limit 1 - exp(-e^(y/2)/sqrt(2*pi)).

Finite samples plug in alpha_hat = log(p)/sqrt(n) and beta_hat = log(p)/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InfeasibleThresholdError, ShapeError

__all__ = [
    "Regime",
    "RegimeThresholds",
    "RegimeDecision",
    "LawSpec",
    "PivotalStat",
    "classify_regime",
    "K_SUBEXP",
    "K_SUPEREXP",
    "k_exponential",
    "subexp_cdf",
    "transitional_cdf",
    "exp_cdf",
    "superexp_cdf",
    "superexp_stat",
    "pivotal_stat",
    "LlnPrediction",
    "lln_prediction",
    "threshold_from_level",
    "sn_from_stat",
    "law_cdf",
]

K_SUBEXP = 1.0 / math.sqrt(8.0 * math.pi)
K_SUPEREXP = 1.0 / math.sqrt(2.0 * math.pi)


class Regime(str, Enum):
    SUBEXP = "SubExp"
    TRANSITIONAL = "Transitional"
    EXPONENTIAL = "Exponential"
    SUPEREXP = "SuperExp"


@dataclass(frozen=True)
class RegimeThresholds:
    """Heuristic classification boundaries; all configurable.

    ``boundary_margin`` is the relative distance to a boundary below which
    the classification is flagged ambiguous.
    """

    sub_alpha_max: float = 0.3
    trans_alpha_max: float = 3.0
    trans_beta_max: float = 0.1
    super_beta_min: float = 10.0
    boundary_margin: float = 0.2


@dataclass(frozen=True)
class RegimeDecision:
    regime: "Regime"
    alpha_hat: float
    beta_hat: float
    ambiguous: bool
    candidates: tuple["Regime", ...]
    note: str


@dataclass(frozen=True)
class LawSpec:
    """A regime with the finite-sample plug-in parameters for (n, p)."""

    regime: Regime
    n: int
    p: int
    uncentered: bool = False

    def __post_init__(self):
        if self.n < 3 or self.p < 2:
            raise ShapeError(f"need n >= 3 and p >= 2, got n={self.n}, p={self.p}")

    @property
    def alpha_hat(self) -> float:
        return math.log(self.p) / math.sqrt(self.n)

    @property
    def beta_hat(self) -> float:
        return math.log(self.p) / self.n


@dataclass(frozen=True)
class PivotalStat:
    """A coherence mapped to its asymptotically parameter-free scale."""

    value: float
    centering: float
    scale_note: str


def _near(x: float, boundary: float, margin: float) -> bool:
    return boundary > 0 and abs(x - boundary) <= margin * boundary


def classify_regime(n: int, p: int, thresholds: RegimeThresholds | None = None) -> RegimeDecision:
    """Pick the asymptotic regime best matching a finite (n, p).

    The growth conditions are statements about limits, so any finite answer
    is a heuristic; decisions near a boundary, and size combinations no band
    covers cleanly, are flagged with the candidate regimes listed.
    """
    if n < 3 or p < 2:
        raise ShapeError(f"need n >= 3 and p >= 2, got n={n}, p={p}")
    th = thresholds or RegimeThresholds()
    lp = math.log(p)
    a = lp / math.sqrt(n)
    b = lp / n

    if b > th.super_beta_min:
        regime = Regime.SUPEREXP
    elif a < th.sub_alpha_max:
        regime = Regime.SUBEXP
    elif a <= th.trans_alpha_max and b < th.trans_beta_max:
        regime = Regime.TRANSITIONAL
    else:
        regime = Regime.EXPONENTIAL

    candidates = [regime]
    notes = []
    if regime is Regime.EXPONENTIAL and a > th.trans_alpha_max and b <= th.super_beta_min:
        # log(p) dwarfs sqrt(n) yet log(p)/n is moderate: with n this small the
        # exponential and super-exponential descriptions are both defensible
        candidates.append(Regime.SUPEREXP)
        notes.append(
            f"alpha_hat={a:.3g} exceeds the transitional band while beta_hat={b:.3g} "
            f"is below {th.super_beta_min:g}; exponential and super-exponential laws both plausible"
        )
    m = th.boundary_margin
    if _near(a, th.sub_alpha_max, m):
        for r in (Regime.SUBEXP, Regime.TRANSITIONAL):
            if r not in candidates:
                candidates.append(r)
        notes.append(f"alpha_hat={a:.3g} is near the sub-exponential boundary {th.sub_alpha_max:g}")
    if _near(b, th.trans_beta_max, m):
        for r in (Regime.TRANSITIONAL, Regime.EXPONENTIAL):
            if r not in candidates:
                candidates.append(r)
        notes.append(f"beta_hat={b:.3g} is near the transitional/exponential boundary {th.trans_beta_max:g}")
    if _near(b, th.super_beta_min, m):
        for r in (Regime.EXPONENTIAL, Regime.SUPEREXP):
            if r not in candidates:
                candidates.append(r)
        notes.append(f"beta_hat={b:.3g} is near the super-exponential boundary {th.super_beta_min:g}")

    return RegimeDecision(
        regime=regime,
        alpha_hat=a,
        beta_hat=b,
        ambiguous=len(candidates) > 1,
        candidates=tuple(candidates),
        note="; ".join(notes),
    )


def k_exponential(beta: float) -> float:
    """The exponential-regime constant K(beta) = sqrt(beta / (2 pi (1 - e^(-4 beta))))."""
    if not (beta > 0):
        raise DomainError(f"need beta > 0, got {beta}")
    return math.sqrt(beta / (2.0 * math.pi * (-math.expm1(-4.0 * beta))))


def subexp_cdf(y):
    """Limit CDF 1 - exp(-K0 e^(y/2)) of the sub-exponential pivotal statistic."""
    yy = np.asarray(y, dtype=np.float64)
    out = -np.expm1(-K_SUBEXP * np.exp(yy / 2.0))
    return float(out) if np.isscalar(y) else out


def transitional_cdf(y, alpha: float):
    """Limit CDF exp(-K0 e^(-(y + 8 alpha^2)/2)) of the transitional statistic.

    At alpha = 0 this is the classical double-exponential law; positive alpha
    shifts it left by exactly 8 alpha^2.
    """
    if alpha < 0:
        raise DomainError(f"need alpha >= 0, got {alpha}")
    yy = np.asarray(y, dtype=np.float64)
    out = np.exp(-K_SUBEXP * np.exp(-(yy + 8.0 * alpha * alpha) / 2.0))
    return float(out) if np.isscalar(y) else out


def exp_cdf(y, beta: float):
    """Limit CDF 1 - exp(-K(beta) e^((y + 8 beta)/2)) of the exponential-regime statistic."""
    kb = k_exponential(beta)
    yy = np.asarray(y, dtype=np.float64)
    out = -np.expm1(-kb * np.exp((yy + 8.0 * beta) / 2.0))
    return float(out) if np.isscalar(y) else out


def superexp_cdf(y):
    """Limit CDF 1 - exp(-e^(y/2)/sqrt(2 pi)) of the super-exponential statistic."""
    yy = np.asarray(y, dtype=np.float64)
    out = -np.expm1(-K_SUPEREXP * np.exp(yy / 2.0))
    return float(out) if np.isscalar(y) else out


def _t_from_l(value: float) -> float:
    from .kernel import log_one_minus_square

    return log_one_minus_square(value)


def superexp_stat(value: float, n: int, p: int, uncentered: bool = False) -> PivotalStat:
    """Map a coherence to the super-exponential pivotal scale.

    The centering multiplies log(p) by 4n/(n-2) (centered coherence) or
    4n/(n-1) (uncentered); a coherence of 1 maps to -inf.
    """
    if uncentered:
        if n < 2:
            raise ShapeError("uncentered super-exponential transform needs n >= 2")
        factor = 4.0 * n / (n - 1.0)
        note = "n*log(1-L^2) + (4n/(n-1))*log(p) - log(n)"
    else:
        if n < 3:
            raise ShapeError("centered super-exponential transform needs n >= 3")
        factor = 4.0 * n / (n - 2.0)
        note = "n*log(1-L^2) + (4n/(n-2))*log(p) - log(n)"
    centering = factor * math.log(p) - math.log(n)
    return PivotalStat(value=n * _t_from_l(value) + centering, centering=centering, scale_note=note)


def pivotal_stat(spec: LawSpec, value: float) -> PivotalStat:
    """Map a coherence value to the pivotal scale of ``spec.regime``."""
    lp = math.log(spec.p)
    llp = math.log(lp)
    n = spec.n
    if spec.regime in (Regime.SUBEXP, Regime.EXPONENTIAL):
        centering = 4.0 * lp - llp
        return PivotalStat(
            value=n * _t_from_l(value) + centering,
            centering=centering,
            scale_note="n*log(1-L^2) + 4*log(p) - log(log(p))",
        )
    if spec.regime is Regime.TRANSITIONAL:
        centering = -4.0 * lp + llp
        return PivotalStat(
            value=n * value * value + centering,
            centering=centering,
            scale_note="n*L^2 - 4*log(p) + log(log(p))",
        )
    return superexp_stat(value, n, spec.p, uncentered=spec.uncentered)


@dataclass(frozen=True)
class LlnPrediction:
    """Where the coherence concentrates under a given LawSpec.

    ``log_complement_ratio`` is the super-exponential prediction for
    (n / log p) * log(1 - L^2); None in the other regimes.
    """

    coherence: float
    log_complement_ratio: float | None = None


def lln_prediction(spec: LawSpec) -> LlnPrediction:
    """Predicted location of the coherence for ``spec.regime`` at (n, p)."""
    lp = math.log(spec.p)
    if spec.regime in (Regime.SUBEXP, Regime.TRANSITIONAL):
        return LlnPrediction(coherence=2.0 * math.sqrt(lp / spec.n))
    if spec.regime is Regime.EXPONENTIAL:
        return LlnPrediction(coherence=math.sqrt(-math.expm1(-4.0 * spec.beta_hat)))
    return LlnPrediction(coherence=1.0, log_complement_ratio=-4.0)


def _law_quantile(spec: LawSpec, prob: float) -> float:
    """Invert the limiting CDF of ``spec.regime`` in closed form."""
    if spec.regime is Regime.TRANSITIONAL:
        # exp(-K0 e^(-(y + 8 a^2)/2)) = prob
        a = spec.alpha_hat
        return -8.0 * a * a - 2.0 * math.log(math.log(1.0 / prob) / K_SUBEXP)
    w = -math.log1p(-prob)  # log(1 / (1 - prob))
    if spec.regime is Regime.SUBEXP:
        return 2.0 * math.log(w / K_SUBEXP)
    if spec.regime is Regime.EXPONENTIAL:
        b = spec.beta_hat
        return 2.0 * math.log(w / k_exponential(b)) - 8.0 * b
    return 2.0 * math.log(w / K_SUPEREXP)


def sn_from_stat(spec: LawSpec, y: float) -> float:
    """Squared-coherence threshold equivalent to a pivotal-scale value y.

    For the log-complement statistics, {statistic <= y} equals
    {L^2 >= s_n} with s_n = 1 - exp((y - centering)/n); the transitional
    statistic lives on the L^2 scale already, so {statistic >= y} equals
    {L^2 >= (y - centering)/n}.
    """
    n, lp, llp = spec.n, math.log(spec.p), math.log(math.log(spec.p))
    if spec.regime is Regime.TRANSITIONAL:
        s = (y + 4.0 * lp - llp) / n
    elif spec.regime in (Regime.SUBEXP, Regime.EXPONENTIAL):
        s = -math.expm1((y - 4.0 * lp + llp) / n)
    else:
        factor = 4.0 * n / (n - 1.0) if spec.uncentered else 4.0 * n / (n - 2.0)
        s = -math.expm1((y - factor * lp + math.log(n)) / n)
    if not (0.0 < s < 1.0):
        raise InfeasibleThresholdError(
            f"pivotal value y={y:.6g} maps to squared-coherence threshold {s:.6g} "
            f"outside (0, 1) at n={n}, p={spec.p}; no coherence threshold realizes it"
        )
    return s


def threshold_from_level(spec: LawSpec, prob: float) -> float:
    """Squared-coherence threshold whose limiting CDF value is ``prob``.

    Inverts the regime's limit law for the pivotal value y, then maps y to
    the coherence scale; the returned s satisfies
    cdf(pivotal_stat(spec, sqrt(s))) = prob up to roundoff.
    """
    if not (0.0 < prob < 1.0):
        raise DomainError(f"need prob in (0, 1), got {prob}")
    return sn_from_stat(spec, _law_quantile(spec, prob))


def law_cdf(spec: LawSpec):
    """The limiting CDF callable for a LawSpec (closing over its plug-in parameter)."""
    if spec.regime is Regime.SUBEXP:
        return subexp_cdf
    if spec.regime is Regime.TRANSITIONAL:
        a = spec.alpha_hat
        return lambda y: transitional_cdf(y, a)
    if spec.regime is Regime.EXPONENTIAL:
        b = spec.beta_hat
        return lambda y: exp_cdf(y, b)
    return superexp_cdf
