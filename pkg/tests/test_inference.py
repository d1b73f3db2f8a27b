"""Independence test thresholds, p-values, and the sparse-recovery calculator."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohlaw import (
    CoherenceResult,
    CorrLaw,
    DomainError,
    Gaussian,
    LawSpec,
    ParameterError,
    Regime,
    TestMethod,
    coherence,
    independence_test,
    k_exponential,
    make_sensing_matrix,
    mip_report,
    poisson_approx,
    sample_matrix,
    tail_prob,
    transitional_cdf,
)

LOG_8PI = math.log(8.0 * math.pi)


def _result(value, n=100, p=500, centered=True):
    return CoherenceResult(value, (1, 2), centered, math.log1p(-value * value), n, p)


def _w(alpha):
    return -math.log1p(-alpha)


def test_subexp_threshold_matches_closed_form():
    report = independence_test(_result(0.5075), 0.05, regime=Regime.SUBEXP)
    assert report.method is TestMethod.ASYMPTOTIC_LAW
    assert report.rejection_side == "upper"
    assert report.threshold == pytest.approx(-LOG_8PI - 2.0 * math.log(_w(0.05)), rel=1e-10)
    lp = math.log(500.0)
    l_scale = math.sqrt((report.threshold + 4.0 * lp - math.log(lp)) / 100.0)
    assert l_scale == pytest.approx(0.507422396024, abs=1e-10)
    assert report.reject is True
    assert independence_test(_result(0.5073), 0.05, regime=Regime.SUBEXP).reject is False


def test_level_near_one_rejects_everything_with_p_below_one():
    report = independence_test(_result(0.48), 1.0 - 1e-6, regime=Regime.SUBEXP)
    assert report.p_value < 1.0 - 1e-6
    assert report.reject is True
    # a coherence deep in the left tail has p-value exactly 1.0 and never rejects
    deep_left = independence_test(_result(0.01), 1.0 - 1e-12, regime=Regime.SUBEXP)
    assert deep_left.p_value == 1.0
    assert deep_left.reject is False


def test_threshold_decreases_with_level():
    t1 = independence_test(_result(0.3), 0.01, regime=Regime.SUBEXP).threshold
    t2 = independence_test(_result(0.3), 0.10, regime=Regime.SUBEXP).threshold
    assert t2 < t1


def test_exponential_threshold_matches_closed_form():
    report = independence_test(_result(0.86, n=30, p=8103), 0.05, regime=Regime.EXPONENTIAL)
    beta = math.log(8103.0) / 30.0
    expected = 2.0 * math.log(_w(0.05)) - 2.0 * math.log(k_exponential(beta)) - 8.0 * beta
    assert report.threshold == pytest.approx(expected, rel=1e-12)
    # beta-hat is 0.30000 here, so the exact beta = 0.3 arithmetic (with
    # -2 log K(0.3) = 2.68346745287) lands within 1e-4 of the reported value.
    assert report.threshold == pytest.approx(-5.65692304521, abs=1e-4)
    assert -2.0 * math.log(k_exponential(0.3)) == pytest.approx(2.68346745287, abs=1e-9)
    assert report.rejection_side == "lower"
    assert report.reject is True
    assert independence_test(_result(0.85, n=30, p=8103), 0.05, regime=Regime.EXPONENTIAL).reject is False


def test_superexp_path():
    report = independence_test(_result(0.9999, n=5, p=30_000), 0.05, regime=Regime.SUPEREXP)
    assert report.rejection_side == "lower"
    # L = 0.9999 is unremarkable when the null itself pushes coherence to 1.
    assert report.reject is False
    assert report.p_value > 0.5


def test_transitional_default_at_100_by_500():
    report = independence_test(_result(0.49), 0.05)
    assert report.regime.regime is Regime.TRANSITIONAL
    alpha_hat = math.log(500.0) / 10.0
    y = -8.0 * alpha_hat**2 - LOG_8PI - 2.0 * math.log(_w(0.05))
    assert report.threshold == pytest.approx(y, rel=1e-10)
    assert report.p_value == pytest.approx(1.0 - transitional_cdf(report.statistic, alpha_hat), rel=1e-10)


def test_p_value_reject_duality_asymptotic():
    for regime, value, n, p in (
        (Regime.SUBEXP, 0.4, 100, 500),
        (Regime.TRANSITIONAL, 0.52, 100, 500),
        (Regime.EXPONENTIAL, 0.9, 30, 8103),
        (Regime.SUPEREXP, 0.99995, 5, 30_000),
    ):
        for alpha in (0.01, 0.05, 0.2, 0.8):
            report = independence_test(_result(value, n=n, p=p), alpha, regime=regime)
            assert report.reject == (report.p_value <= alpha), (regime, alpha, report)
            assert report.level == alpha


def test_p_value_matches_level_at_threshold():
    # Setting the level to the observed p-value puts the statistic exactly on
    # the threshold; the two numbers must then agree to 1e-12.
    base = independence_test(_result(0.4), 0.05, regime=Regime.SUBEXP)
    report = independence_test(_result(0.4), base.p_value, regime=Regime.SUBEXP)
    assert abs(report.p_value - report.level) < 1e-12


def test_chen_stein_method_brackets_p_value():
    report = independence_test(_result(0.5075), 0.05, method=TestMethod.CHEN_STEIN_FINITE_N)
    assert report.method is TestMethod.CHEN_STEIN_FINITE_N
    lam = poisson_approx(100, 500, 0.5075).lam
    assert report.p_value == pytest.approx(-math.expm1(-lam), rel=1e-12)
    lo, hi = report.p_value_interval
    assert lo <= report.p_value <= hi
    bound = poisson_approx(100, 500, 0.5075).error_bound
    assert hi - report.p_value <= bound + 1e-15
    assert report.reject == (report.p_value <= 0.05)


def test_chen_stein_threshold_is_exact_quantile():
    report = independence_test(_result(0.2), 0.05, method="ChenSteinFiniteN")
    target = _w(0.05) / (500.0 * 499.0 / 2.0)
    assert tail_prob(CorrLaw(100), report.threshold) == pytest.approx(target, rel=1e-9)
    assert report.rejection_side == "upper"
    assert report.reject is False


def test_chen_stein_duality():
    for value in (0.3, 0.45, 0.481, 0.55):
        report = independence_test(_result(value), 0.05, method=TestMethod.CHEN_STEIN_FINITE_N)
        assert report.reject == (report.p_value <= 0.05)


def test_matrix_input_end_to_end():
    m = sample_matrix(Gaussian(1.0), 50, 40, 123)
    report = independence_test(m, 0.05)
    direct = coherence(m)
    assert report.coherence_value == pytest.approx(direct.value, rel=1e-15)
    assert report.regime.n == 50 and report.regime.p == 40
    again = independence_test(direct, 0.05)
    assert again.statistic == report.statistic
    assert again.reject == report.reject


def test_uncentered_flag():
    m = sample_matrix(Gaussian(1.0), 50, 40, 124)
    report = independence_test(m, 0.05, use_uncentered=True)
    direct = coherence(m, centered=False)
    assert report.coherence_value == pytest.approx(direct.value, rel=1e-15)
    assert report.regime.uncentered is True


def test_alpha_domain():
    for alpha in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(DomainError):
            independence_test(_result(0.4), alpha)


def test_regime_override_accepts_strings():
    report = independence_test(_result(0.4), 0.05, regime="SubExp")
    assert report.regime.regime is Regime.SUBEXP
    spec = LawSpec(Regime.EXPONENTIAL, 100, 500)
    report = independence_test(_result(0.4), 0.05, regime=spec)
    assert report.regime is spec


def test_mip_k_max_values():
    report = mip_report(0.2, ks=[1, 2, 3])
    assert report.coherence == 0.2
    assert report.k_max == 2
    assert report.mip_holds_for_k == {1: True, 2: True, 3: False}
    assert report.unbounded is False
    assert mip_report(1.0).k_max == 0
    assert mip_report(1.0 / 3.0).k_max == 1
    assert mip_report(0.1999999).k_max == 3


def test_mip_boundary_is_strict():
    report = mip_report(0.2)
    assert (2 * report.k_max - 1) * 0.2 < 1.0
    assert (2 * (report.k_max + 1) - 1) * 0.2 >= 1.0


def test_mip_zero_coherence_unbounded():
    report = mip_report(0.0, ks=[10, 1000])
    assert report.unbounded is True
    assert report.mip_holds_for_k == {10: True, 1000: True}


def test_mip_asymptotic_k():
    report = mip_report(1.0, n=400, p=55)
    assert report.asymptotic_k == pytest.approx(0.25 * math.sqrt(400.0 / math.log(55.0)), rel=1e-12)
    assert report.asymptotic_k == pytest.approx(2.5, abs=0.01)
    assert mip_report(0.5).asymptotic_k is None


def test_mip_rejects_centered_input():
    with pytest.raises(ParameterError):
        mip_report(_result(0.3, centered=True))
    report = mip_report(_result(0.3, n=50, p=40, centered=False))
    assert report.coherence == 0.3


def test_mip_domain():
    with pytest.raises(DomainError):
        mip_report(1.5)
    with pytest.raises(DomainError):
        mip_report(-0.1)


def test_sensing_matrix_column_norms():
    m = make_sensing_matrix(100, 1000, 55)
    norms_sq = (m.data**2).sum(axis=0)
    assert 0.95 <= float(norms_sq.mean()) <= 1.05


def test_sensing_matrix_determinism():
    a = make_sensing_matrix(30, 50, 7)
    b = make_sensing_matrix(30, 50, 7)
    assert np.array_equal(a.data, b.data)
    assert a.spec == Gaussian(1.0 / math.sqrt(30.0))


def test_sensing_matrix_coherence_near_lln():
    m = make_sensing_matrix(256, 10_000, 2)
    value = coherence(m, centered=False).value
    predicted = 2.0 * math.sqrt(math.log(10_000.0) / 256.0)
    assert abs(value - predicted) / predicted < 0.15


@settings(max_examples=80, deadline=None)
@given(value=st.floats(min_value=1e-6, max_value=1.0))
def test_mip_k_max_monotone_property(value):
    report = mip_report(value)
    tighter = mip_report(min(1.0, value * 1.5))
    assert tighter.k_max <= report.k_max
    assert report.k_max >= 0
    assert (2 * report.k_max - 1) * value < 1.0


@settings(max_examples=40, deadline=None)
@given(
    value=st.floats(min_value=0.05, max_value=0.99),
    alpha=st.floats(min_value=0.001, max_value=0.999),
)
def test_duality_property(value, alpha):
    report = independence_test(_result(value), alpha, regime=Regime.TRANSITIONAL)
    if abs(report.p_value - alpha) > 1e-9:
        assert report.reject == (report.p_value <= alpha)
