"""Applications of the coherence laws: independence testing and sensing audits.

The independence test rejects "all population correlations are zero" when
the observed coherence is too large for that null. Two engines are offered:

* AsymptoticLaw: closed-form threshold from the limiting distribution of the
  regime the sizes fall in. In the sub-exponential and transitional regimes
  the rejection region is an upper-tail cut on n L^2 - 4 log p + log log p;
  in the exponential and super-exponential regimes it is a lower-tail cut on
  the log-complement pivotal statistic (strong correlation drives
  log(1 - L^2) far negative).
* ChenSteinFiniteN: exact-n threshold solving lambda(t) = -log(1 - alpha) in
  the Poisson approximation, with the p-value bracketed by the
  approximation's rigorous error bound. Sharper than the asymptotic laws at
  desk-scale n.

The compressed-sensing side reports the largest sparsity k for which the
mutual-incoherence condition (2k - 1) * coherence < 1 holds, together with
the asymptotic sparsity scale sqrt(n / log p) / 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, ParameterError
from .exact import CorrLaw, tail_quantile
from .kernel import CoherenceResult, coherence
from .limits import (
    K_SUPEREXP,
    LawSpec,
    Regime,
    classify_regime,
    exp_cdf,
    k_exponential,
    pivotal_stat,
    superexp_cdf,
    transitional_cdf,
)
from .poisson import poisson_approx
from .sampling import Gaussian, SampleMatrix, sample_matrix

__all__ = [
    "TestMethod",
    "TestReport",
    "MipReport",
    "independence_test",
    "mip_report",
    "make_sensing_matrix",
]


class TestMethod(str, Enum):
    ASYMPTOTIC_LAW = "AsymptoticLaw"
    CHEN_STEIN_FINITE_N = "ChenSteinFiniteN"


@dataclass(frozen=True)
class TestReport:
    """Outcome of the coherence independence test at a fixed level.

    ``statistic`` and ``threshold`` live on the same scale (which scale that
    is depends on regime and method; ``rejection_side`` records which side
    rejects). ``p_value_interval`` brackets the p-value by the finite-n error
    bound and is only set for the ChenSteinFiniteN method.
    """

    statistic: float
    regime: LawSpec
    threshold: float
    reject: bool
    p_value: float
    method: TestMethod
    level: float
    rejection_side: str
    coherence_value: float
    p_value_interval: tuple[float, float] | None = None


@dataclass(frozen=True)
class MipReport:
    """Mutual-incoherence audit of a (sensing) matrix.

    ``k_max`` is the largest sparsity passing (2k - 1) * coherence < 1, or
    None when the coherence is zero and every k passes (``unbounded``).
    """

    coherence: float
    k_max: int | None
    asymptotic_k: float | None
    mip_holds_for_k: dict[int, bool]
    unbounded: bool = False


def _coherence_of(source, centered: bool) -> CoherenceResult:
    if isinstance(source, CoherenceResult):
        return source
    if isinstance(source, SampleMatrix) or isinstance(source, np.ndarray):
        return coherence(source, centered=centered)
    raise ParameterError(f"expected a SampleMatrix, array, or CoherenceResult, got {type(source)!r}")


def _asymptotic_report(res: CoherenceResult, spec: LawSpec, alpha: float) -> TestReport:
    stat = pivotal_stat(spec, res.value).value
    w = math.log1p(-alpha) * -1.0  # log(1/(1-alpha))
    if spec.regime in (Regime.SUBEXP, Regime.TRANSITIONAL):
        # upper tail of the double-exponential law of n L^2 - 4 log p + log log p
        a = spec.alpha_hat if spec.regime is Regime.TRANSITIONAL else 0.0
        threshold = -8.0 * a * a - math.log(8.0 * math.pi) - 2.0 * math.log(w)
        p_value = 1.0 - transitional_cdf(stat, a)
        reject = stat >= threshold
        side = "upper"
        if spec.regime is Regime.SUBEXP:
            # report the statistic on the same L^2 scale the threshold uses
            lp = math.log(spec.p)
            stat = spec.n * res.value**2 - 4.0 * lp + math.log(lp)
            reject = stat >= threshold
            p_value = 1.0 - transitional_cdf(stat, 0.0)
    elif spec.regime is Regime.EXPONENTIAL:
        b = spec.beta_hat
        threshold = 2.0 * math.log(w) - 2.0 * math.log(k_exponential(b)) - 8.0 * b
        p_value = exp_cdf(stat, b)
        reject = stat <= threshold
        side = "lower"
    else:
        threshold = 2.0 * math.log(w / K_SUPEREXP)
        p_value = superexp_cdf(stat)
        reject = stat <= threshold
        side = "lower"
    return TestReport(
        statistic=float(stat),
        regime=spec,
        threshold=float(threshold),
        reject=bool(reject),
        p_value=float(min(max(p_value, 0.0), 1.0)),
        method=TestMethod.ASYMPTOTIC_LAW,
        level=alpha,
        rejection_side=side,
        coherence_value=res.value,
    )


def _chen_stein_report(res: CoherenceResult, spec: LawSpec, alpha: float) -> TestReport:
    n, p = res.n, res.p
    law = CorrLaw(n, centered=res.centered)
    pairs = 0.5 * p * (p - 1)
    target = -math.log1p(-alpha) / pairs
    threshold = tail_quantile(law, min(target, 1.0))
    approx = poisson_approx(n, p, res.value, centered=res.centered)
    p_value = -math.expm1(-approx.lam)
    reject = res.value >= threshold
    lo = max(0.0, p_value - approx.error_bound)
    hi = min(1.0, p_value + approx.error_bound)
    return TestReport(
        statistic=res.value,
        regime=spec,
        threshold=float(threshold),
        reject=bool(reject),
        p_value=float(p_value),
        method=TestMethod.CHEN_STEIN_FINITE_N,
        level=alpha,
        rejection_side="upper",
        coherence_value=res.value,
        p_value_interval=(lo, hi),
    )


def independence_test(
    source,
    alpha: float,
    method: TestMethod | str = TestMethod.ASYMPTOTIC_LAW,
    regime: Regime | LawSpec | None = None,
    use_uncentered: bool = False,
) -> TestReport:
    """Level-alpha test of zero population correlation from the coherence.

    ``source`` is a SampleMatrix (or array), in which case the coherence is
    computed here, or an existing CoherenceResult. The regime is classified
    from (n, p) unless overridden. Rejection always corresponds exactly to
    p_value <= alpha.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"need alpha in (0, 1), got {alpha}")
    method = TestMethod(method)
    res = _coherence_of(source, centered=not use_uncentered)
    if isinstance(regime, LawSpec):
        spec = regime
    else:
        r = regime if regime is not None else classify_regime(res.n, res.p).regime
        spec = LawSpec(regime=Regime(r), n=res.n, p=res.p, uncentered=not res.centered)
    if method is TestMethod.CHEN_STEIN_FINITE_N:
        return _chen_stein_report(res, spec, alpha)
    return _asymptotic_report(res, spec, alpha)


def mip_report(source, ks=None, n: int | None = None, p: int | None = None) -> MipReport:
    """Sparsity audit via the mutual-incoherence condition (2k-1) L < 1.

    ``source`` may be a SampleMatrix/array (uncentered coherence is computed),
    an uncentered CoherenceResult, or a bare coherence value in [0, 1]. The
    centered coherence is rejected because the condition is stated for raw
    column inner products.
    """
    if isinstance(source, CoherenceResult):
        if source.centered:
            raise ParameterError("mip_report needs the uncentered coherence; got a centered result")
        value, n, p = source.value, source.n, source.p
    elif isinstance(source, (int, float, np.floating)):
        value = float(source)
        if not (0.0 <= value <= 1.0):
            raise DomainError(f"coherence value must lie in [0, 1], got {value}")
    else:
        res = _coherence_of(source, centered=False)
        value, n, p = res.value, res.n, res.p

    asymptotic_k = 0.25 * math.sqrt(n / math.log(p)) if (n and p) else None
    ks = sorted(set(int(k) for k in (ks or ())))
    if any(k < 1 for k in ks):
        raise ParameterError("queried sparsities must be integers >= 1")
    holds = {k: (2 * k - 1) * value < 1.0 for k in ks}

    if value == 0.0:
        return MipReport(coherence=value, k_max=None, asymptotic_k=asymptotic_k, mip_holds_for_k=holds, unbounded=True)

    # closed-form start, then settle boundary floating-point cases exactly
    k = max(0, math.ceil((1.0 / value + 1.0) / 2.0) - 1)
    while (2 * (k + 1) - 1) * value < 1.0:
        k += 1
    while k > 0 and (2 * k - 1) * value >= 1.0:
        k -= 1
    return MipReport(coherence=value, k_max=k, asymptotic_k=asymptotic_k, mip_holds_for_k=holds)


def make_sensing_matrix(n: int, p: int, seed: int) -> SampleMatrix:
    """Gaussian sensing matrix with entry variance 1/n (unit expected column norm)."""
    return sample_matrix(Gaussian(sigma=1.0 / math.sqrt(n)), n, p, seed)
