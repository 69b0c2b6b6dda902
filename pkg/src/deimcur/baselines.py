"""Competing index selections: leverage scores (top-k and sampled) and QR-CUR."""
from dataclasses import dataclass

import numpy as np

from .densecore import as_matrix, column_pivoted_qr
from .selection import IndexSelection


@dataclass(frozen=True)
class LeverageScores:
    scores: np.ndarray
    r_used: int

    def __len__(self):
        return self.scores.size

    def scaled(self):
        """Scores divided by their maximum, for tabulation."""
        mx = self.scores.max()
        return self.scores / mx if mx > 0 else self.scores.copy()


def leverage_scores(V, r=None):
    """Squared row norms of the leading ``r`` columns of ``V`` (all when ``r`` is None)."""
    V = as_matrix(V, "V")
    if r is None:
        r = V.shape[1]
    if not 1 <= r <= V.shape[1]:
        raise ValueError(f"r={r} out of range 1..{V.shape[1]}")
    Vr = V[:, :r]
    return LeverageScores(np.einsum("ij,ij->i", Vr, Vr), int(r))


def top_k_select(scores, k):
    """Indices of the ``k`` largest scores, largest first, ties to the lower index."""
    s = np.asarray(getattr(scores, "scores", scores), dtype=np.float64)
    if not 1 <= k <= s.size:
        raise ValueError(f"k={k} out of range 1..{s.size}")
    order = np.argsort(-s, kind="stable")[:k]
    return IndexSelection.from_zero_based(order, "leverage-top")


def _generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def sample_select(scores, k, seed):
    """Draw ``k`` distinct indices without replacement, each draw proportional to
    the scores still in the pool.

    ``seed`` is an int (fed to PCG64) or a ready ``numpy.random.Generator``.
    One uniform variate is consumed per draw, so streams are reproducible.
    """
    w = np.array(getattr(scores, "scores", scores), dtype=np.float64)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("scores must be finite and nonnegative")
    if k < 1 or np.count_nonzero(w) < k:
        raise ValueError(f"need k >= 1 and at least k={k} positive scores, "
                         f"have {np.count_nonzero(w)}")
    rng = _generator(seed)
    picked = []
    for _ in range(k):
        cdf = np.cumsum(w)
        u = rng.random() * cdf[-1]
        i = int(np.searchsorted(cdf, u, side="right"))
        i = min(i, w.size - 1)
        while w[i] == 0.0:  # u landed on a flat stretch at the right end
            i -= 1
        picked.append(i)
        w[i] = 0.0
    return IndexSelection.from_zero_based(picked, "leverage-sample")


def qr_cur_select(A, k):
    """QR-CUR: columns from pivoted QR of ``A``, rows from pivoted QR of ``C^T``."""
    A = as_matrix(A)
    q = column_pivoted_qr(A, k)
    C = A[:, q.zero_based]
    p = column_pivoted_qr(C.T, k)
    return p, q
