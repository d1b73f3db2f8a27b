"""Batch Monte Carlo engine: replicated experiments and verification suites.

``run`` turns an :class:`ExperimentConfig` into an :class:`EmpiricalDist` of
one statistic, deterministically for a given seed. ``verify_suite`` bundles
the library's distributional claims into named, runnable checks that report
measured values against fixed tolerances.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy import special as sp

from .errors import DomainError, ParameterError, ResourceBudgetError, ShapeError
from .exact import CorrLaw, small_n_law, tail_quantile
from .kernel import coherence, pair_correlations
from .limits import (
    LawSpec,
    Regime,
    exp_cdf,
    lln_prediction,
    pivotal_stat,
    subexp_cdf,
    superexp_cdf,
)
from .poisson import poisson_approx
from .sampling import DistributionSpec, Gaussian, sample_matrix

__all__ = [
    "DEFAULT_BUDGET",
    "DEFAULT_SEED",
    "SUITE_NAMES",
    "EmpiricalDist",
    "ExperimentConfig",
    "Statistic",
    "compare_to_law",
    "flop_estimate",
    "ks_distance",
    "run",
    "verify_suite",
]

DEFAULT_BUDGET = 1e16
DEFAULT_SEED = 20260819
# target float count per sampling chunk (~32 MB of doubles)
_BULK_VALUES = 4_000_000


class Statistic(str, Enum):
    """Per-replicate statistic an experiment records."""

    COHERENCE = "L"
    COHERENCE_UNCENTERED = "Ltilde"
    PIVOTAL_SUBEXP = "PivotalSubExp"
    PIVOTAL_TRANSITIONAL = "PivotalTransitional"
    PIVOTAL_EXP = "PivotalExp"
    PIVOTAL_SUPEREXP = "PivotalSuperExp"
    RHO12 = "Rho12"
    RHO12RHO13 = "Rho12Rho13"


_PIVOTAL_REGIME = {
    Statistic.PIVOTAL_SUBEXP: Regime.SUBEXP,
    Statistic.PIVOTAL_TRANSITIONAL: Regime.TRANSITIONAL,
    Statistic.PIVOTAL_EXP: Regime.EXPONENTIAL,
    Statistic.PIVOTAL_SUPEREXP: Regime.SUPEREXP,
}

# statistics that touch only a prefix of the columns
_COLUMNS_USED = {Statistic.RHO12: 2, Statistic.RHO12RHO13: 3}


@dataclass(frozen=True)
class ExperimentConfig:
    """A replicated sampling experiment: distribution, sizes, and statistic."""

    dist: DistributionSpec
    n: int
    p: int
    replicates: int
    seed: int
    statistic: Statistic
    out: str | None = None
    out_format: str = "csv"

    def __post_init__(self):
        try:
            object.__setattr__(self, "statistic", Statistic(self.statistic))
        except ValueError as exc:
            raise ParameterError(str(exc)) from None
        if self.replicates < 1:
            raise ParameterError(f"need replicates >= 1, got {self.replicates}")
        if self.n < 2 or self.p < 2:
            raise ShapeError(f"need n >= 2 and p >= 2, got n={self.n}, p={self.p}")
        if self.statistic is Statistic.RHO12RHO13 and self.p < 3:
            raise ShapeError("the paired-correlation statistic needs p >= 3")
        if self.statistic in _PIVOTAL_REGIME and self.n < 3:
            raise ShapeError("pivotal statistics need n >= 3")
        if self.out_format not in ("csv", "json"):
            raise ParameterError(f"out_format must be 'csv' or 'json', got {self.out_format!r}")


@dataclass(frozen=True)
class EmpiricalDist:
    """Sorted samples of one statistic plus bookkeeping.

    ``samples`` holds the finite values in ascending order; ``n_eff`` is the
    replicate count requested, so ``n_eff - len(samples)`` values were
    dropped (tallied in ``flags``). ``paired`` carries the raw (rho12, rho13)
    rows for the paired statistic and is None otherwise. ``ks_vs`` is filled
    by :func:`compare_to_law`.
    """

    samples: np.ndarray
    n_eff: int
    statistic: Statistic
    n: int
    p: int
    flags: dict
    paired: np.ndarray | None = None
    ks_vs: tuple[str, float, float] | None = None


def flop_estimate(config: ExperimentConfig) -> float:
    """Estimated pair-flops for a config: n * p^2 * replicates / 2."""
    return config.n * float(config.p) ** 2 * config.replicates / 2.0


def _stat_from_matrix(config: ExperimentConfig):
    """The per-matrix scalar statistic for non-pairwise statistics."""
    stat = config.statistic
    if stat is Statistic.COHERENCE:
        return lambda m: coherence(m).value
    if stat is Statistic.COHERENCE_UNCENTERED:
        return lambda m: coherence(m, centered=False).value
    spec = LawSpec(_PIVOTAL_REGIME[stat], config.n, config.p)
    return lambda m: pivotal_stat(spec, coherence(m).value).value


def _corr_rows(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise centered correlation of two (count, n) blocks."""
    xc = x - x.mean(axis=1, keepdims=True)
    yc = y - y.mean(axis=1, keepdims=True)
    num = np.einsum("ij,ij->i", xc, yc)
    den2 = np.einsum("ij,ij->i", xc, xc) * np.einsum("ij,ij->i", yc, yc)
    out = np.full(x.shape[0], np.nan)
    ok = den2 > 0.0
    out[ok] = num[ok] / np.sqrt(den2[ok])
    return np.clip(out, -1.0, 1.0, out=out)


def _gaussian_replicates(config: ExperimentConfig):
    """Vectorized replicate loop for Gaussian columns.

    Samples arrive in fixed-size chunks, each from its own counter-based
    substream keyed by (seed, chunk index), so results do not depend on how
    chunks are scheduled.
    """
    stat = config.statistic
    n = config.n
    p_used = _COLUMNS_USED.get(stat, config.p)
    per = max(1, _BULK_VALUES // (n * p_used))
    reps = config.replicates
    sigma = config.dist.sigma
    raw = np.empty(reps)
    paired = np.empty((reps, 2)) if stat is Statistic.RHO12RHO13 else None
    matrix_stat = None if stat in _COLUMNS_USED else _stat_from_matrix(config)
    done = 0
    chunk = 0
    while done < reps:
        count = min(per, reps - done)
        ss = np.random.SeedSequence(config.seed, spawn_key=(1, chunk))
        gen = np.random.Generator(np.random.Philox(ss))
        values = gen.standard_normal((count, p_used, n))
        if sigma != 1.0:
            values *= sigma
        if stat is Statistic.RHO12:
            raw[done : done + count] = _corr_rows(values[:, 0, :], values[:, 1, :])
        elif stat is Statistic.RHO12RHO13:
            r12 = _corr_rows(values[:, 0, :], values[:, 1, :])
            r13 = _corr_rows(values[:, 0, :], values[:, 2, :])
            paired[done : done + count, 0] = r12
            paired[done : done + count, 1] = r13
            raw[done : done + count] = r12
        else:
            for r in range(count):
                raw[done + r] = matrix_stat(values[r].T)
        done += count
        chunk += 1
    return raw, paired


def _general_replicates(config: ExperimentConfig):
    """One sample_matrix call per replicate, each from its own substream."""
    stat = config.statistic
    p_used = _COLUMNS_USED.get(stat, config.p)
    reps = config.replicates
    raw = np.empty(reps)
    paired = np.empty((reps, 2)) if stat is Statistic.RHO12RHO13 else None
    matrix_stat = None if stat in _COLUMNS_USED else _stat_from_matrix(config)
    for rep in range(reps):
        ss = np.random.SeedSequence(config.seed, spawn_key=(rep,))
        m = sample_matrix(config.dist, config.n, p_used, int(ss.generate_state(1, np.uint64)[0]))
        if stat is Statistic.RHO12:
            raw[rep] = pair_correlations(m, [(1, 2)])[0]
        elif stat is Statistic.RHO12RHO13:
            r12, r13 = pair_correlations(m, [(1, 2), (1, 3)])
            paired[rep, 0] = r12
            paired[rep, 1] = r13
            raw[rep] = r12
        else:
            raw[rep] = matrix_stat(m.data)
    return raw, paired


def run(config: ExperimentConfig, budget: float = DEFAULT_BUDGET) -> EmpiricalDist:
    """Execute the experiment and collect the statistic's empirical law.

    Identical configs give bit-identical results regardless of chunking or
    thread count, because every random draw is tied to (seed, replicate
    position) alone. Non-finite statistic values (a coherence of exactly 1
    maps to -inf on log scales) are excluded from ``samples`` and counted
    under ``flags["non_finite_excluded"]``.
    """
    estimate = flop_estimate(config)
    if estimate > budget:
        raise ResourceBudgetError(estimate, budget)
    if isinstance(config.dist, Gaussian):
        raw, paired = _gaussian_replicates(config)
    else:
        raw, paired = _general_replicates(config)
    finite = raw[np.isfinite(raw)]
    flags: dict = {}
    dropped = int(raw.size - finite.size)
    if dropped:
        flags["non_finite_excluded"] = dropped
    if config.replicates == 1:
        flags["ks_undefined"] = 1
    return EmpiricalDist(
        samples=np.sort(finite),
        n_eff=config.replicates,
        statistic=config.statistic,
        n=config.n,
        p=config.p,
        flags=flags,
        paired=paired,
    )


def ks_distance(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance between samples and a reference CDF.

    Accepts an :class:`EmpiricalDist` or a plain array. Both one-sided
    envelopes of the step function are compared against the CDF at every
    sample point.
    """
    xs = samples.samples if isinstance(samples, EmpiricalDist) else np.sort(np.asarray(samples, dtype=np.float64))
    count = xs.size
    if count == 0:
        raise DomainError("KS distance needs at least one sample")
    try:
        f = np.asarray(cdf(xs), dtype=np.float64)
    except (TypeError, ValueError):
        f = np.array([float(cdf(x)) for x in xs])
    if f.shape != xs.shape:
        f = np.array([float(cdf(x)) for x in xs])
    hi = np.arange(1, count + 1, dtype=np.float64) / count
    d_plus = float(np.max(hi - f))
    d_minus = float(np.max(f - hi + 1.0 / count))
    return max(d_plus, d_minus)


def compare_to_law(dist: EmpiricalDist, law_name: str, cdf) -> EmpiricalDist:
    """Attach (law name, KS distance, plug-in p-value) to an EmpiricalDist.

    With fewer than two usable samples the distance is not meaningful, so the
    result only gains a ``ks_undefined`` flag.
    """
    if dist.samples.size < 2:
        flags = dict(dist.flags)
        flags["ks_undefined"] = 1
        return replace(dist, flags=flags)
    d = ks_distance(dist, cdf)
    p_value = float(sp.kolmogorov(math.sqrt(dist.samples.size) * d))
    return replace(dist, ks_vs=(law_name, d, p_value))


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


def _cfg(dist, n, p, reps, seed, stat) -> ExperimentConfig:
    return ExperimentConfig(dist=dist, n=n, p=p, replicates=reps, seed=seed, statistic=stat)


def _bound_check(name, measured, bound, gating=True):
    row = {"name": name, "measured": float(measured), "bound": float(bound), "passed": bool(measured <= bound)}
    if not gating:
        row["gating"] = False
    return row


def _window_check(name, measured, low, high, gating=True):
    row = {
        "name": name,
        "measured": float(measured),
        "window": [float(low), float(high)],
        "passed": bool(low <= measured <= high),
    }
    if not gating:
        row["gating"] = False
    return row


def _log_complement(values: np.ndarray) -> np.ndarray:
    """Vectorized log(1 - v^2) in the factored form that survives v near 1."""
    return np.log1p(-values) + np.log1p(values)


def _suite_small_n_laws(budget, replicates, seed):
    reps = int(replicates or 100_000)
    start = time.perf_counter()
    two_rows = run(_cfg(Gaussian(), 2, 2, reps, seed, Statistic.RHO12), budget)
    frac_plus = float(np.mean(two_rows.samples > 0.999))
    checks = [_window_check("two-row-sign-frequency", frac_plus, 0.49, 0.51)]
    for n in (3, 4, 5):
        law = small_n_law(n)
        dist = run(_cfg(Gaussian(), n, 2, reps, seed + n, Statistic.RHO12), budget)
        checks.append(_bound_check(f"ks-{law.name}-n{n}", ks_distance(dist, law.cdf), 0.006))
    checks.append(_bound_check("runtime-seconds", time.perf_counter() - start, 10.0))
    return checks, []


def _suite_pairwise_independence(budget, replicates, seed):
    reps = int(replicates or 100_000)
    start = time.perf_counter()
    dist = run(_cfg(Gaussian(), 6, 3, reps, seed, Statistic.RHO12RHO13), budget)
    keep = np.isfinite(dist.paired).all(axis=1)
    r12 = dist.paired[keep, 0]
    r13 = dist.paired[keep, 1]
    corr = float(np.corrcoef(r12, r13)[0, 1])
    cells = 10
    edges12 = np.quantile(r12, np.linspace(0.0, 1.0, cells + 1))
    edges13 = np.quantile(r13, np.linspace(0.0, 1.0, cells + 1))
    edges12[0] -= 1e-9
    edges12[-1] += 1e-9
    edges13[0] -= 1e-9
    edges13[-1] += 1e-9
    counts, _, _ = np.histogram2d(r12, r13, bins=[edges12, edges13])
    expected = r12.size / (cells * cells)
    chisq = float(((counts - expected) ** 2 / expected).sum())
    p_value = float(sp.chdtrc((cells - 1) ** 2, chisq))
    checks = [
        _bound_check("abs-corr-rho12-rho13", abs(corr), 0.02),
        _window_check("chi-square-independence-p-value", p_value, 0.001, 1.0),
        _bound_check("runtime-seconds", time.perf_counter() - start, 10.0),
    ]
    notes = [f"chi-square statistic {chisq:.2f} on {(cells - 1) ** 2} degrees of freedom"]
    return checks, notes


def _suite_subexp_limit(budget, replicates, seed):
    reps = int(replicates or 2000)
    start = time.perf_counter()
    dist = run(_cfg(Gaussian(), 100, 500, reps, seed, Statistic.PIVOTAL_SUBEXP), budget)
    dist = compare_to_law(dist, "subexp", subexp_cdf)
    checks = [
        _bound_check("ks-vs-subexp-limit", dist.ks_vs[1], 0.05),
        _bound_check("runtime-seconds", time.perf_counter() - start, 300.0),
    ]
    notes = [
        "at 100 rows the pivotal statistic's law sits a fixed distance from its limit "
        "(KS distance concentrating near 0.12), so the 0.05 tolerance fails honestly "
        "at any replicate count; scaling the log-complement by n - 2 instead of n "
        "removes most of the gap"
    ]
    return checks, notes


def _suite_transitional_shift(budget, replicates, seed):
    reps = int(replicates or 1000)
    n1, p1 = 2500, 148
    n2, p2 = 169, 8955
    a1 = math.log(p1) / math.sqrt(n1)
    a2 = math.log(p2) / math.sqrt(n2)
    low = run(_cfg(Gaussian(), n1, p1, reps, seed, Statistic.PIVOTAL_TRANSITIONAL), budget)
    high = run(_cfg(Gaussian(), n2, p2, reps, seed + 1, Statistic.PIVOTAL_TRANSITIONAL), budget)
    med_low = float(np.median(low.samples))
    med_high = float(np.median(high.samples))
    predicted = 8.0 * (a2 * a2 - a1 * a1)
    measured = med_low - med_high
    checks = [
        _window_check("alpha-hat-low", a1, 0.09, 0.11, gating=False),
        _window_check("alpha-hat-high", a2, 0.63, 0.77, gating=False),
        _bound_check("median-shift-relative-error", abs(measured - predicted) / predicted, 0.30),
    ]
    notes = [
        f"medians {med_low:.4f} (alpha-hat {a1:.4f}) and {med_high:.4f} (alpha-hat {a2:.4f}); "
        f"shift {measured:.4f} vs predicted {predicted:.4f}",
        "holding 400 rows, alpha-hat = 0.70 needs p = exp(14) ~ 1.2e6 columns, about 2.9e17 "
        "pair-flops for 1000 replicates; the 169-row, 8955-column pair keeps alpha-hat = 0.700 "
        "at about 7e12 pair-flops",
        "finite-sample medians overshoot the limiting medians enough that the measured shift "
        "lands near 37% above the prediction at every feasible size with these alpha values",
    ]
    return checks, notes


def _suite_exp_limit(budget, replicates, seed):
    reps = int(replicates or 500)
    n, p = 30, 8103
    start = time.perf_counter()
    dist = run(_cfg(Gaussian(), n, p, reps, seed, Statistic.COHERENCE), budget)
    values = dist.samples
    target_mean = math.sqrt(-math.expm1(-1.2))
    lp = math.log(p)
    pivot = n * _log_complement(values) + 4.0 * lp - math.log(lp)
    pivot = pivot[np.isfinite(pivot)]
    checks = [
        _bound_check("ks-vs-exp-limit-beta-0.3", ks_distance(pivot, lambda y: exp_cdf(y, 0.3)), 0.08),
        _bound_check("mean-coherence-gap", abs(float(values.mean()) - target_mean), 0.05),
        _bound_check("runtime-seconds", time.perf_counter() - start, 600.0),
    ]
    notes = [
        f"beta-hat = log({p})/{n} = {lp / n:.6f}; mean coherence {float(values.mean()):.4f} "
        f"vs sqrt(1 - exp(-1.2)) = {target_mean:.4f}"
    ]
    return checks, notes


def _suite_superexp_limit(budget, replicates, seed):
    reps = int(replicates or 200)
    n, p = 5, 30_000
    lp = math.log(p)
    centered = run(_cfg(Gaussian(), n, p, reps, seed, Statistic.COHERENCE), budget)
    uncentered = run(_cfg(Gaussian(), n, p, reps, seed, Statistic.COHERENCE_UNCENTERED), budget)
    t_centered = _log_complement(centered.samples)
    t_uncentered = _log_complement(uncentered.samples)
    med_centered = float(np.median(n * t_centered / lp))
    med_uncentered = float(np.median(n * t_uncentered / lp))
    measured_gap = float(np.mean(n * t_uncentered) - np.mean(n * t_centered))
    predicted_gap = (4.0 * n / (n - 2.0) - 4.0 * n / (n - 1.0)) * lp
    pivot = n * t_centered + (4.0 * n / (n - 2.0)) * lp - math.log(n)
    pivot = pivot[np.isfinite(pivot)]
    checks = [
        _bound_check("median-scaled-log-complement-relative-error", abs(med_centered / -4.0 - 1.0), 0.25),
        _bound_check("centering-gap-relative-error", abs(measured_gap - predicted_gap) / predicted_gap, 0.30),
        _bound_check("ks-vs-superexp-limit", ks_distance(pivot, superexp_cdf), 0.12, gating=False),
        _bound_check(
            "median-scaled-uncentered-relative-error", abs(med_uncentered / -4.0 - 1.0), 0.25, gating=False
        ),
    ]
    notes = [
        f"median of (n/log p) log(1 - value^2): centered {med_centered:.4f}, "
        f"uncentered {med_uncentered:.4f}, limit target -4",
        "with 5 rows the centered correlation has 3 effective degrees of freedom, which drives "
        "the scaled median to about -6.3; the uncentered variant (4 degrees) sits near -4.7, "
        "so only the latter approaches the limit target at this tiny row count",
        f"centering gap between the two pivotal statistics: measured {measured_gap:.4f} "
        f"vs predicted {predicted_gap:.4f}",
    ]
    return checks, notes


def _suite_chen_stein_bound(budget, replicates, seed):
    reps = int(replicates or 2000)
    checks = []
    lambdas = []
    cell = 0
    for n in (10, 50, 100):
        law = CorrLaw(n)
        for p in (20, 100, 500):
            threshold = tail_quantile(law, 2.0 / (p * (p - 1)))
            approx = poisson_approx(n, p, threshold)
            lambdas.append(approx.lam)
            dist = run(_cfg(Gaussian(), n, p, reps, seed + cell, Statistic.COHERENCE), budget)
            p_hat = float(np.mean(dist.samples <= threshold))
            se = math.sqrt(approx.prob * (1.0 - approx.prob) / reps)
            row = _bound_check(f"cell-n{n}-p{p}", abs(p_hat - approx.prob), approx.error_bound + 3.0 * se)
            row["lambda"] = approx.lam
            row["threshold"] = threshold
            checks.append(row)
            cell += 1
    checks.append(_window_check("lambda-smallest", min(lambdas), 0.2, 3.0))
    checks.append(_window_check("lambda-largest", max(lambdas), 0.2, 3.0))
    notes = ["thresholds are set per cell so the expected exceedance count is exactly 1"]
    return checks, notes


def _suite_lln(budget, replicates, seed):
    reps = int(replicates or 100)
    n = p = 2000
    dist = run(_cfg(Gaussian(), n, p, reps, seed, Statistic.COHERENCE), budget)
    measured = float(np.mean(math.sqrt(n / math.log(p)) * dist.samples))
    checks = [_window_check("mean-scaled-coherence", measured, 1.8, 2.2)]
    prediction = lln_prediction(LawSpec(Regime.SUBEXP, n, p)).coherence
    notes = [f"raw-scale concentration target 2 sqrt(log p / n) = {prediction:.4f}"]
    return checks, notes


def _suite_gaussian_remark(budget, replicates, seed):
    reps = int(replicates or 10_000)
    n = 10_000
    dist = run(_cfg(Gaussian(), n, 2, reps, seed, Statistic.RHO12), budget)
    scaled = math.sqrt(n) * dist.samples
    checks = [_bound_check("ks-sqrt-n-rho-vs-standard-normal", ks_distance(scaled, sp.ndtr), 0.02)]
    return checks, []


_SUITES = {
    "small-n-laws": _suite_small_n_laws,
    "pairwise-independence": _suite_pairwise_independence,
    "subexp-limit": _suite_subexp_limit,
    "transitional-shift": _suite_transitional_shift,
    "exp-limit": _suite_exp_limit,
    "superexp-limit": _suite_superexp_limit,
    "chen-stein-bound": _suite_chen_stein_bound,
    "lln": _suite_lln,
    "gaussian-remark": _suite_gaussian_remark,
}

SUITE_NAMES = tuple(_SUITES)


def verify_suite(
    name: str,
    budget: float = DEFAULT_BUDGET,
    replicates: int | None = None,
    seed: int = DEFAULT_SEED,
) -> dict:
    """Run one named verification suite and return a JSON-ready report.

    ``replicates`` rescales every experiment in the suite (testing hook); the
    default runs each suite at its registered full size. A check row with
    ``gating: False`` is informational and does not affect the suite verdict.
    """
    try:
        builder = _SUITES[name]
    except KeyError:
        raise ParameterError(f"unknown suite {name!r}; choose from {sorted(_SUITES)}") from None
    start = time.perf_counter()
    checks, notes = builder(budget, replicates, seed)
    elapsed = time.perf_counter() - start
    passed = all(c["passed"] for c in checks if c.get("gating", True))
    return {
        "suite": name,
        "passed": passed,
        "elapsed_seconds": round(elapsed, 3),
        "seed": seed,
        "checks": checks,
        "notes": notes,
    }
