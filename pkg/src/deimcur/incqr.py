"""One-pass incremental QR with threshold deflation, and the SVD built from it.

Columns are orthogonalised as they arrive; whenever the smallest row of ``R``
is negligible next to the rest of ``R`` (in Frobenius norm, relative ``tol``)
that row and the matching column of ``Q`` are dropped.  After ``d`` such
deletions ``||A - Q R||_F <= tol * d * ||R||_F``.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .densecore import RankKSvd, as_matrix, dgks_orthogonalize, economy_svd

log = logging.getLogger(__name__)

ROWNORM_REFRESH = 256


@dataclass
class Deflation:
    column: int  # 1-based stream position that triggered it
    row: int  # 0-based row of R removed
    row_norm_sq: float
    threshold: float  # tol^2 * (||R||_F^2 - row_norm_sq) at removal time


@dataclass
class IncrementalQrResult:
    Q: np.ndarray
    R: np.ndarray
    deletions: int
    certificate: float
    columns_processed: int
    deflations: list = field(default_factory=list)

    @property
    def rank(self):
        return self.Q.shape[1]


class IncrementalQR:
    """Mutable state of the streaming factorisation; feed columns with :meth:`push`."""

    def __init__(self, m, tol, initial_block=None):
        if m < 1:
            raise ValueError("m must be positive")
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        if initial_block is None:
            initial_block = min(10, m)
        if not 1 <= initial_block <= m:
            raise ValueError(f"initial_block must lie in 1..{m}")
        self.m = m
        self.tol = float(tol)
        self.initial_block = initial_block
        self._Q = np.zeros((m, 8))
        self._R = np.zeros((8, 16))
        self.k = 0
        self.j = 0
        self.rownorms = np.zeros(8)
        self.deletions = 0
        self.deflations = []

    @property
    def Q(self):
        return self._Q[:, :self.k]

    @property
    def R(self):
        return self._R[:self.k, :self.j]

    def _reserve(self, rows, cols):
        # capacity doubling; rows of R, columns of Q and rownorms grow together
        r0, c0 = self._R.shape
        if rows <= r0 and cols <= c0:
            return
        r1 = 2 * r0 if rows > r0 else r0
        c1 = 2 * c0 if cols > c0 else c0
        R = np.zeros((r1, c1))
        R[:r0, :c0] = self._R
        self._R = R
        if r1 > r0:
            Q = np.zeros((self.m, r1))
            Q[:, :r0] = self._Q
            self._Q = Q
            rn = np.zeros(r1)
            rn[:r0] = self.rownorms
            self.rownorms = rn

    def push(self, a):
        a = np.asarray(a, dtype=np.float64).ravel()
        if a.size != self.m:
            raise ValueError(f"column {self.j + 1} has length {a.size}, expected {self.m}")
        if not np.all(np.isfinite(a)):
            raise ValueError(f"column {self.j + 1} is not finite")
        k, j = self.k, self.j
        res = dgks_orthogonalize(self.Q, a)
        self._reserve(k + 1, j + 1)
        self._R[:k, j] = res.r
        self.rownorms[:k] += res.r ** 2
        self.j = j + 1
        if res.dependent:
            # equivalent to appending a zero row and deflating it at once
            pass
        else:
            self._Q[:, k] = res.q
            self._R[k, :j] = 0.0
            self._R[k, j] = res.rho
            self.rownorms[k] = res.rho ** 2
            self.k = k + 1
            if self.j > self.initial_block:
                self._maybe_deflate()
        if self.j % ROWNORM_REFRESH == 0:
            R = self.R
            self.rownorms[:self.k] = np.einsum("ij,ij->i", R, R)

    def _maybe_deflate(self):
        k = self.k
        rn = self.rownorms[:k]
        fro2 = rn.sum()
        i = int(np.argmin(rn))
        sigma = rn[i]
        threshold = self.tol ** 2 * (fro2 - sigma)
        if sigma > threshold:
            return
        last = k - 1
        if i < last:
            self._R[i, :self.j] = self._R[last, :self.j]
            self._Q[:, i] = self._Q[:, last]
            self.rownorms[i] = self.rownorms[last]
        self._R[last, :self.j] = 0.0
        self.rownorms[last] = 0.0
        self.k = last
        self.deletions += 1
        self.deflations.append(Deflation(self.j, i, float(sigma), float(threshold)))
        log.debug("column %d: deflated row %d (|r|^2=%.3e <= %.3e)", self.j, i, sigma, threshold)

    def certificate(self):
        """``tol * d * ||R||_F`` with the current (post-deletion) ``R``."""
        return self.tol * self.deletions * float(np.linalg.norm(self.R))

    def result(self):
        return IncrementalQrResult(self.Q.copy(), self.R.copy(), self.deletions,
                                   self.certificate(), self.j, list(self.deflations))


def iter_columns(A):
    """Yield the columns of a dense matrix in order."""
    A = as_matrix(A)
    for j in range(A.shape[1]):
        yield A[:, j]


def incremental_qr(column_stream, tol, initial_block=None, a_fro=None, stop_rtol=1e-12):
    """Single pass over ``column_stream`` building ``A ~ Q R``.

    ``a_fro`` (a caller-supplied ``||A||_F``) enables early stopping once
    ``||R||_F`` reaches it to relative accuracy ``stop_rtol``; the remaining
    columns are then left unread.
    """
    state = None
    for a in column_stream:
        if state is None:
            a = np.asarray(a, dtype=np.float64).ravel()
            state = IncrementalQR(a.size, tol,
                                  initial_block if initial_block is not None else min(10, a.size))
        state.push(a)
        if a_fro is not None and np.sqrt(state.rownorms[:state.k].sum()) >= (1 - stop_rtol) * a_fro:
            log.info("early stop after %d columns", state.j)
            break
    if state is None:
        raise ValueError("empty column stream")
    return state.result()


def approx_svd_from_qr(Q, R, certificate):
    """``Q R = (Q Vh) S W^T`` from a dense SVD of the small factor ``R``."""
    Q = as_matrix(Q, "Q")
    R = as_matrix(R, "R")
    if Q.shape[1] != R.shape[0]:
        raise ValueError(f"Q has {Q.shape[1]} columns but R has {R.shape[0]} rows")
    small = economy_svd(R)
    return RankKSvd(Q @ small.V, small.S, small.W, float(certificate), exact=False)
