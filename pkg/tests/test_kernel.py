"""Coherence kernel: agreement with the naive oracle plus exact invariances."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cohlaw import (
    DegenerateColumnError,
    Gaussian,
    SampleMatrix,
    ShapeError,
    coherence,
    log_one_minus_square,
    pair_correlations,
    sample_matrix,
)
from helpers import naive_coherence, naive_pearson


def _matrix(data, seed=0):
    data = np.asarray(data, dtype=float)
    return SampleMatrix(data.shape[0], data.shape[1], data, seed, None)


def test_exact_positive_multiple_hits_one():
    rng = np.random.default_rng(3)
    x1 = rng.standard_normal(6)
    x3 = rng.standard_normal(6)
    m = _matrix(np.column_stack([x1, 3.0 * x1, x3]))
    result = coherence(m)
    assert result.value == 1.0
    assert result.pair == (1, 2)
    assert result.t_stat == -math.inf


def test_two_rows_always_perfectly_correlated():
    rng = np.random.default_rng(4)
    m = _matrix(rng.standard_normal((2, 5)))
    result = coherence(m, centered=True)
    assert result.value == pytest.approx(1.0, abs=1e-12)


def test_fixed_integer_matrix_matches_naive():
    data = np.array(
        [
            [3, 1, 4, 1],
            [5, 9, 2, 6],
            [5, 3, 5, 8],
            [9, 7, 9, 3],
            [2, 3, 8, 4],
        ],
        dtype=float,
    )
    result = coherence(_matrix(data))
    ref_value, ref_pair = naive_coherence(data)
    assert result.value == pytest.approx(ref_value, rel=1e-12)
    assert result.pair == ref_pair


def test_uncentered_matches_naive():
    rng = np.random.default_rng(8)
    data = rng.standard_normal((7, 6)) + 0.5
    result = coherence(_matrix(data), centered=False)
    ref_value, ref_pair = naive_coherence(data, centered=False)
    assert result.value == pytest.approx(ref_value, rel=1e-12)
    assert result.pair == ref_pair


def test_result_fields_well_formed():
    m = sample_matrix(Gaussian(1.0), 10, 8, 21)
    r = coherence(m)
    assert 0.0 <= r.value <= 1.0
    assert 1 <= r.pair[0] < r.pair[1] <= 8
    assert r.t_stat <= 0.0
    assert r.t_stat == pytest.approx(math.log1p(-r.value**2), abs=1e-12)
    assert (r.n, r.p, r.centered) == (10, 8, True)


def test_tie_breaks_to_lexicographic_pair():
    rng = np.random.default_rng(9)
    x = rng.standard_normal(8)
    # Every pair of these collinear columns reaches the same |rho|, so the
    # reported pair must be the lexicographically smallest one.
    m = _matrix(np.column_stack([x, -x, 2.0 * x, -4.0 * x]))
    r = coherence(m)
    assert r.value == pytest.approx(1.0, abs=1e-12)
    assert r.pair == (1, 2)


def test_block_size_does_not_change_result():
    m = sample_matrix(Gaussian(1.0), 12, 50, 33)
    base = coherence(m, block=1024)
    for block in (3, 7, 16, 49):
        other = coherence(m, block=block)
        assert other.value == base.value
        assert other.pair == base.pair


def test_affine_invariance_centered():
    rng = np.random.default_rng(10)
    data = rng.standard_normal((9, 5))
    base = coherence(_matrix(data))
    rho_base = pair_correlations(_matrix(data), [(1, 2)])[0]
    for a, b in ((2.5, -1.0), (-0.3, 4.0)):
        shifted = data.copy()
        shifted[:, 1] = a * shifted[:, 1] + b
        moved = coherence(_matrix(shifted))
        rho_moved = pair_correlations(_matrix(shifted), [(1, 2)])[0]
        assert moved.value == pytest.approx(base.value, abs=1e-10)
        assert abs(rho_moved) == pytest.approx(abs(rho_base), abs=1e-10)
        assert math.copysign(1.0, rho_moved) == math.copysign(1.0, a) * math.copysign(1.0, rho_base)


def test_scale_invariance_uncentered():
    rng = np.random.default_rng(11)
    data = rng.standard_normal((9, 5))
    base = coherence(_matrix(data), centered=False)
    scaled = data.copy()
    scaled[:, 2] *= -7.5
    moved = coherence(_matrix(scaled), centered=False)
    assert moved.value == pytest.approx(base.value, abs=1e-10)


def test_rotation_invariance_uncentered():
    rng = np.random.default_rng(12)
    data = rng.standard_normal((9, 6))
    q, _ = np.linalg.qr(rng.standard_normal((9, 9)))
    base = coherence(_matrix(data), centered=False)
    rotated = coherence(_matrix(q @ data), centered=False)
    assert rotated.value == pytest.approx(base.value, abs=1e-10)


def test_row_permutation_invariance_centered():
    rng = np.random.default_rng(13)
    data = rng.standard_normal((15, 10))
    base = coherence(_matrix(data))
    permuted = coherence(_matrix(data[rng.permutation(15)]))
    # Reordering rows reorders float summation, so agreement is to rounding,
    # not bitwise.
    assert permuted.value == pytest.approx(base.value, abs=1e-12)
    assert permuted.pair == base.pair


def test_blocked_vs_naive_fuzz_sample():
    rng = np.random.default_rng(14)
    for _ in range(40):
        n = int(rng.integers(3, 21))
        p = int(rng.integers(2, 51))
        data = rng.standard_normal((n, p))
        result = coherence(_matrix(data), block=int(rng.integers(2, 60)))
        ref_value, ref_pair = naive_coherence(data)
        assert abs(result.value - ref_value) <= 1e-12
        assert result.pair == ref_pair


def test_pair_correlations_matches_oracle():
    rng = np.random.default_rng(15)
    data = rng.standard_normal((6, 3))
    m = _matrix(data)
    got = pair_correlations(m, [(1, 2), (1, 3), (2, 3)])
    for value, (i, j) in zip(got, [(1, 2), (1, 3), (2, 3)]):
        assert value == pytest.approx(naive_pearson(data[:, i - 1], data[:, j - 1]), abs=1e-12)
        assert -1.0 <= value <= 1.0


def test_pair_correlations_identical_columns():
    data = np.column_stack([np.arange(5.0), np.arange(5.0)])
    assert pair_correlations(_matrix(data), [(1, 2)]) == [1.0]


def test_pair_correlations_rejects_bad_pairs():
    m = sample_matrix(Gaussian(1.0), 5, 3, 0)
    for pairs in ([(1, 1)], [(2, 1)], [(0, 2)], [(1, 4)]):
        with pytest.raises(ShapeError):
            pair_correlations(m, pairs)


def test_constant_column_reports_index():
    data = np.column_stack([np.arange(6.0), np.full(6, 2.0), np.arange(6.0) ** 2])
    with pytest.raises(DegenerateColumnError) as exc:
        coherence(_matrix(data))
    assert exc.value.column == 2


def test_zero_column_uncentered_reports_index():
    data = np.column_stack([np.arange(1.0, 7.0), np.zeros(6)])
    with pytest.raises(DegenerateColumnError) as exc:
        coherence(_matrix(data), centered=False)
    assert exc.value.column == 2


def test_constant_column_allowed_when_uncentered():
    data = np.column_stack([np.arange(1.0, 7.0), np.full(6, 2.0)])
    r = coherence(_matrix(data), centered=False)
    assert 0.0 <= r.value <= 1.0


def test_log_one_minus_square_stability():
    assert log_one_minus_square(1.0) == -math.inf
    assert log_one_minus_square(0.0) == 0.0
    # Near one the factored form (1-v)(1+v) keeps eight digits that the
    # naive 1 - v*v would destroy.
    v = 1.0 - 1e-12
    assert log_one_minus_square(v) == pytest.approx(math.log((1.0 - v) * (1.0 + v)), rel=1e-12)
    assert log_one_minus_square(v) == pytest.approx(math.log(2e-12), rel=1e-6)
    assert log_one_minus_square(0.3) == pytest.approx(math.log(0.91), rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(
    arrays(
        np.float64,
        st.tuples(st.integers(3, 9), st.integers(2, 8)),
        elements=st.floats(-50, 50, allow_nan=False, width=64),
    )
)
def test_blocked_equals_naive_property(data):
    stds = data.std(axis=0)
    if stds.min() < 1e-6:
        return
    result = coherence(_matrix(data), block=4)
    ref_value, ref_pair = naive_coherence(data)
    assert abs(result.value - ref_value) <= 1e-12
    assert 0.0 <= result.value <= 1.0
    # Pair agreement is only well defined away from exact ties, which
    # adversarial inputs (duplicated columns) can manufacture.
    runner_up = sorted(
        abs(naive_pearson(data[:, i], data[:, j])) for i in range(data.shape[1]) for j in range(i + 1, data.shape[1])
    )
    if len(runner_up) > 1 and ref_value - runner_up[-2] > 1e-9:
        assert result.pair == ref_pair
