"""Finite-sample Poisson approximation of the coherence CDF and its bound."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohlaw import (
    CorrLaw,
    DomainError,
    LawSpec,
    Regime,
    ShapeError,
    h_n_value,
    poisson_approx,
    subexp_cdf,
    tail_quantile,
    threshold_from_level,
)


def test_uniform_law_example():
    a = poisson_approx(4, 10, 0.99)
    assert a.lam == pytest.approx(0.45, rel=1e-12)
    assert a.prob == pytest.approx(math.exp(-0.45), rel=1e-12)
    assert a.error_bound == pytest.approx(1.296, rel=1e-12)
    assert a.accuracy_flag is True
    assert (a.n, a.p, a.centered) == (4, 10, True)


def test_degenerate_threshold_one():
    a = poisson_approx(6, 30, 1.0)
    assert a.lam == 0.0
    assert a.prob == 1.0
    assert a.error_bound == 0.0
    assert a.accuracy_flag is False


def test_prob_is_exp_of_minus_lambda():
    for t in (0.2, 0.5, 0.8):
        a = poisson_approx(12, 40, t)
        assert a.prob == pytest.approx(math.exp(-a.lam), rel=1e-15)


def test_four_row_closed_form_lambda():
    # With four rows the correlation is uniform, so the expected exceedance
    # count is exactly p(p-1)/2 times (1 - t).
    for p in (5, 20, 100):
        for t in (0.1, 0.5, 0.9, 0.99):
            a = poisson_approx(4, p, t)
            assert a.lam == pytest.approx(p * (p - 1) / 2.0 * (1.0 - t), rel=1e-14)


def test_error_bound_scaling():
    # Below lambda = 1 the bound is 64 lambda^2 / p; above, one factor of
    # lambda is dropped.
    small = poisson_approx(10, 200, tail_quantile(CorrLaw(10), 2.0 * 0.25 / (200 * 199)))
    assert small.lam == pytest.approx(0.25, rel=1e-9)
    assert small.error_bound == pytest.approx(64.0 * small.lam**2 / 200.0, rel=1e-9)

    big = poisson_approx(10, 20, tail_quantile(CorrLaw(10), 4.0 / (20 * 19)))
    assert big.lam == pytest.approx(2.0, rel=1e-9)
    assert big.error_bound == pytest.approx(64.0 * big.lam / 20.0, rel=1e-9)


def test_accuracy_flag_tracks_bound():
    sharp = poisson_approx(100, 500, tail_quantile(CorrLaw(100), 2.0 * 0.05 / (500 * 499)))
    assert sharp.error_bound < 0.05
    assert sharp.accuracy_flag is False


def test_monotone_in_threshold():
    probs = [poisson_approx(10, 20, t).prob for t in np.linspace(0.0, 1.0, 41)]
    assert all(b >= a - 1e-15 for a, b in zip(probs, probs[1:]))


def test_uncentered_shifts_degrees_by_one():
    for t in (0.3, 0.7):
        unc = poisson_approx(9, 50, t, centered=False)
        cen = poisson_approx(10, 50, t, centered=True)
        assert unc.lam == pytest.approx(cen.lam, rel=1e-13)


def test_h_n_trivial_and_example():
    assert h_n_value(1000, 50, 1.0) == 0.0
    ratio = h_n_value(1000, 50, 0.2) / poisson_approx(1000, 50, 0.2).lam
    # The ratio concentrates at p/(p-1) times (1 + 1.25/n + O(1/n^2)), not at
    # 1, so it sits just above the naive [0.99, 1.01] window for p = 50.
    assert ratio == pytest.approx(1.0216860058681, abs=1e-9)
    assert ratio == pytest.approx(50.0 / 49.0 * (1.0 + 1.25 / 1000.0), rel=1e-5)


def test_h_n_ratio_approaches_one():
    ratio = h_n_value(100_000, 10_000, 0.01) / poisson_approx(100_000, 10_000, 0.01).lam
    assert abs(ratio - 1.0) < 2e-4


def test_h_n_at_subexp_scaling():
    spec = LawSpec(Regime.SUBEXP, 10**4, 100)
    t = math.sqrt(threshold_from_level(spec, subexp_cdf(0.0)))
    h = h_n_value(10**4, 100, t)
    assert h == pytest.approx(0.1981486793132, abs=1e-9)
    assert abs(h - 0.199471) < 0.01


def test_convergence_to_subexp_limit():
    spec = LawSpec(Regime.SUBEXP, 10**4, 100)
    gaps = {}
    for y in (-2.0, 0.0, 2.0):
        t = math.sqrt(threshold_from_level(spec, subexp_cdf(y)))
        a = poisson_approx(10**4, 100, t)
        gaps[y] = abs(a.prob - (1.0 - subexp_cdf(y)))
    assert gaps[-2.0] == pytest.approx(0.00446312, abs=2e-6)
    assert gaps[0.0] == pytest.approx(0.00273111, abs=2e-6)
    assert gaps[2.0] == pytest.approx(0.01263927, abs=2e-6)
    # The agreement tightens toward the left tail but the y = 2 point still
    # sits above 0.01 at this size; only the first two make that cut.
    assert gaps[-2.0] < 0.01 and gaps[0.0] < 0.01
    assert gaps[2.0] > 0.01


def test_bound_covers_monte_carlo(null_coherence_samples):
    t = math.sqrt(0.205716872292)
    a = poisson_approx(100, 500, t)
    samples = null_coherence_samples.samples
    p_hat = float(np.mean(samples <= t))
    se = math.sqrt(a.prob * (1.0 - a.prob) / samples.size)
    assert abs(p_hat - a.prob) <= a.error_bound + 3.0 * se


def test_preconditions():
    with pytest.raises(ShapeError):
        poisson_approx(2, 10, 0.5)
    assert poisson_approx(2, 10, 0.5, centered=False).lam > 0.0
    with pytest.raises(ShapeError):
        poisson_approx(10, 1, 0.5)
    with pytest.raises(DomainError):
        poisson_approx(10, 20, -0.1)
    with pytest.raises(DomainError):
        poisson_approx(10, 20, 1.1)
    with pytest.raises(ShapeError):
        h_n_value(2, 10, 0.5)


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(min_value=3, max_value=60),
    p=st.integers(min_value=2, max_value=400),
    t1=st.floats(min_value=0.0, max_value=1.0),
    t2=st.floats(min_value=0.0, max_value=1.0),
)
def test_monotonicity_property(n, p, t1, t2):
    lo, hi = sorted((t1, t2))
    a_lo = poisson_approx(n, p, lo)
    a_hi = poisson_approx(n, p, hi)
    assert a_lo.prob <= a_hi.prob + 1e-14
    assert a_lo.lam >= a_hi.lam - 1e-14
    assert a_lo.error_bound >= 0.0
