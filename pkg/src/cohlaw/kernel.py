"""Coherence of a sample matrix: the largest absolute pairwise correlation.

The centered coherence maximizes the Pearson correlation over all column
pairs; the uncentered variant skips mean subtraction and correlates raw
columns (appropriate when the mean is known to be zero).

The computation normalizes every column once and then scans the implicit
p-by-p Gram matrix in column blocks, never materializing more than one
block, so p in the hundreds of thousands fits in memory. A second pass
revisits only the block pairs that attained the maximum to recover the
achieving pair deterministically (smallest (i, j) lexicographically),
which makes the result independent of any parallel schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateColumnError, ShapeError
from .sampling import SampleMatrix

DEFAULT_BLOCK = 1024


@dataclass(frozen=True)
class CoherenceResult:
    """Largest absolute correlation, the pair achieving it, and log(1 - value^2).

    ``pair`` uses 1-based column indices with pair[0] < pair[1]. ``t_stat``
    is -inf exactly when ``value`` is 1.
    """

    value: float
    pair: tuple[int, int]
    centered: bool
    t_stat: float
    n: int
    p: int


def log_one_minus_square(value: float) -> float:
    """log(1 - value^2) computed stably for value in [0, 1].

    Near value = 1 the direct expression loses all precision, so the factored
    form log(1-v) + log(1+v) takes over.
    """
    v = float(value)
    if v >= 1.0:
        return -np.inf
    if v > 0.9:
        return float(np.log1p(-v) + np.log1p(v))
    return float(np.log1p(-v * v))


def _as_data(m) -> np.ndarray:
    if isinstance(m, SampleMatrix):
        return m.data
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {arr.shape}")
    return arr


def _normalized(data: np.ndarray, centered: bool, labels=None) -> np.ndarray:
    """Columns shifted (optionally) to zero mean and scaled to unit norm.

    ``labels`` maps local column positions to the 1-based indices reported in
    degenerate-column errors (used when normalizing a column subset).
    """
    z = data - data.mean(axis=0, keepdims=True) if centered else np.array(data, dtype=np.float64, copy=True)
    norms = np.linalg.norm(z, axis=0)
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        reason = "constant column" if centered else "zero column"
        col = labels[int(bad[0])] if labels is not None else int(bad[0]) + 1
        raise DegenerateColumnError(col, reason)
    z /= norms
    return z


def coherence(m, centered: bool = True, block: int = DEFAULT_BLOCK) -> CoherenceResult:
    """Largest |correlation| over all column pairs, with the achieving pair.

    Accepts a SampleMatrix or a plain 2-d array. Ties are broken by the
    lexicographically smallest (i, j). Raises DegenerateColumnError when a
    column is constant (centered) or zero (uncentered), naming the column.
    """
    data = _as_data(m)
    n, p = data.shape
    if p < 2:
        raise ShapeError(f"need p >= 2 columns, got p={p}")
    if n < 2:
        raise ShapeError(f"need n >= 2 rows, got n={n}")
    z = _normalized(data, centered)

    nblocks = (p + block - 1) // block
    # phase 1: best |value| per block pair, tracking the global best
    best = -1.0
    block_best: dict[tuple[int, int], float] = {}
    for a in range(nblocks):
        za = z[:, a * block : (a + 1) * block]
        for b in range(a, nblocks):
            g = za.T @ z[:, b * block : (b + 1) * block]
            if a == b:
                np.fill_diagonal(g, 0.0)
            m_ab = max(float(g.max()), -float(g.min()))
            block_best[(a, b)] = m_ab
            if m_ab > best:
                best = m_ab

    # phase 2: revisit only the attaining block pairs; BLAS is deterministic
    # for a fixed shape, so the recomputed block reproduces the same floats
    pair = None
    for (a, b), m_ab in block_best.items():
        if m_ab != best:
            continue
        za = z[:, a * block : (a + 1) * block]
        g = za.T @ z[:, b * block : (b + 1) * block]
        if a == b:
            np.fill_diagonal(g, 0.0)
        rows, cols = np.nonzero(np.abs(g) == best)
        for r, c in zip(rows.tolist(), cols.tolist()):
            i = a * block + r
            j = b * block + c
            if i > j:
                i, j = j, i
            if i == j:
                continue
            cand = (i + 1, j + 1)
            if pair is None or cand < pair:
                pair = cand
    if pair is None:  # pragma: no cover - phase 2 always finds phase 1's max
        raise RuntimeError("internal error: maximum location lost between passes")

    value = min(max(best, 0.0), 1.0)
    return CoherenceResult(
        value=value,
        pair=pair,
        centered=centered,
        t_stat=log_one_minus_square(value),
        n=n,
        p=p,
    )


def pair_correlations(m, pairs, centered: bool = True) -> list[float]:
    """Exact correlation for each requested (i, j) column pair (1-based, i < j)."""
    data = _as_data(m)
    n, p = data.shape
    for i, j in pairs:
        if not (1 <= i < j <= p):
            raise ShapeError(f"pair ({i}, {j}) invalid: need 1 <= i < j <= p={p}")
    used = sorted({k for ij in pairs for k in ij})
    sub = _normalized(data[:, [k - 1 for k in used]], centered, labels=used)
    colmap = {k: idx for idx, k in enumerate(used)}
    out = []
    for i, j in pairs:
        r = float(sub[:, colmap[i]] @ sub[:, colmap[j]])
        out.append(min(max(r, -1.0), 1.0))
    return out
