"""Dense matrix kernels: Gram-Schmidt with reorthogonalisation, Jacobi SVD,
column-pivoted QR, norms and subspace angles.

Matrices are plain 2-D float64 numpy arrays; :func:`as_matrix` is the single
gate that validates them.
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import RankDeficiencyError
from .selection import IndexSelection

EPS = _kernels.EPS

DEPENDENCE_RTOL = 1e3 * EPS
DENSE_CUTOFF = 512
TIE_RTOL = 1e-8
JACOBI_MAX_SWEEPS = 60


def as_matrix(A, name="A"):
    """Return ``A`` as a finite 2-D float64 array (copying only when needed)."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf")
    return A


@dataclass
class RankKSvd:
    """Truncated singular triplets ``A ~ V @ diag(S) @ W.T``.

    ``residual_estimate`` is sigma_{k+1} for an exact truncation, or a certified
    Frobenius bound on the residual when the factors are approximate
    (``exact=False``).
    """

    V: np.ndarray
    S: np.ndarray
    W: np.ndarray
    residual_estimate: float = 0.0
    exact: bool = True
    sweeps: Optional[int] = field(default=None, repr=False)

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=np.float64)
        if self.V.shape[1] != self.S.size or self.W.shape[1] != self.S.size:
            raise ValueError("V, S, W disagree on k")
        if np.any(self.S < 0) or np.any(np.diff(self.S) > 0):
            raise ValueError("singular values must be nonnegative and descending")

    @property
    def k(self):
        return self.S.size

    def reconstruct(self):
        return (self.V * self.S) @ self.W.T


class Orthogonalized(NamedTuple):
    r: np.ndarray
    rho: float
    q: Optional[np.ndarray]  # None when ``a`` is dependent on Q

    @property
    def dependent(self):
        return self.q is None


def dgks_orthogonalize(Q, a):
    """Classical Gram-Schmidt of ``a`` against orthonormal ``Q`` plus one DGKS pass.

    Returns ``(r, rho, q)`` with ``a = Q r + rho q``.  ``q`` is None when
    ``rho <= 1e3 * eps * ||a||`` (``a`` numerically in span(Q)).
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[0] != a.size:
        raise ValueError(f"dimension mismatch: Q {Q.shape}, a ({a.size},)")
    anorm = np.linalg.norm(a)
    if Q.shape[1]:
        r = Q.T @ a
        f = a - Q @ r
        c = Q.T @ f
        f -= Q @ c
        r += c
    else:
        r = np.zeros(0)
        f = a.copy()
    rho = float(np.linalg.norm(f))
    if rho <= DEPENDENCE_RTOL * anorm or rho == 0.0:
        return Orthogonalized(r, rho, None)
    return Orthogonalized(r, rho, f / rho)


def _complete_basis(U, filled):
    # replace unfilled columns with an orthonormal completion (deterministic)
    m = U.shape[0]
    basis = U[:, filled]
    missing = np.flatnonzero(~filled)
    extra = []
    for e in range(m):
        if len(extra) == missing.size:
            break
        cur = np.column_stack([basis] + extra) if extra else basis
        res = dgks_orthogonalize(cur, np.eye(m)[:, e])
        if not res.dependent:
            extra.append(res.q)
    U = U.copy()
    for col, vec in zip(missing, extra):
        U[:, col] = vec
    return U


def _jacobi(R, want_vectors):
    B = np.asfortranarray(R, dtype=np.float64).copy(order="F")
    n = B.shape[1]
    W = np.asfortranarray(np.eye(n)) if want_vectors else None
    tol = max(np.sqrt(B.shape[0]), 1.0) * EPS
    sweeps = _kernels.active.jacobi(B, W, tol, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise RuntimeError("one-sided Jacobi did not converge")
    return B, W, sweeps


def _svd_tall(A, want_vectors):
    m, n = A.shape
    if m > n:
        Qa, R = np.linalg.qr(A)
    else:
        Qa, R = None, A
    B, Wj, sweeps = _jacobi(R, want_vectors)
    S = np.sqrt(np.einsum("ij,ij->j", B, B))
    order = np.argsort(-S, kind="stable")
    S = S[order]
    if not want_vectors:
        return None, S, None, sweeps
    B = B[:, order]
    Wj = np.ascontiguousarray(Wj[:, order])
    # columns at the Jacobi noise floor carry no direction; complete them instead
    filled = S > 2.0 * EPS * np.linalg.norm(S)
    Uh = np.zeros_like(B)
    Uh[:, filled] = B[:, filled] / S[filled]
    if not filled.all():
        Uh = _complete_basis(Uh, filled)
    V = Uh if Qa is None else Qa @ Uh
    return V, S, Wj, sweeps


def economy_svd(A):
    """Thin SVD via Householder QR preconditioning and one-sided Jacobi.

    >>> economy_svd(np.diag([3.0, 1.0])).S
    array([3., 1.])
    """
    A = as_matrix(A)
    m, n = A.shape
    if m >= n:
        V, S, W, sweeps = _svd_tall(A, True)
    else:
        W, S, V, sweeps = _svd_tall(A.T, True)
    return RankKSvd(V, S, W, 0.0, True, sweeps)


def singular_values(A):
    """Singular values only (descending); skips accumulating rotations."""
    A = as_matrix(A)
    if A.shape[0] < A.shape[1]:
        A = A.T
    return _svd_tall(A, False)[1]


def truncate_svd(svd, k):
    if not 1 <= k <= svd.k:
        raise ValueError(f"k={k} out of range 1..{svd.k}")
    if k == svd.k:
        return svd
    return RankKSvd(svd.V[:, :k], svd.S[:k], svd.W[:, :k],
                    float(svd.S[k]) if svd.exact else svd.residual_estimate,
                    svd.exact)


def column_pivoted_qr(A, k):
    """First ``k`` pivot columns (1-based) of column-pivoted Gram-Schmidt QR.

    Each step takes the remaining column of largest 2-norm after projecting
    out earlier pivots; near-ties go to the lowest index.
    """
    A = as_matrix(A)
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"k={k} out of range 1..{min(m, n)}")
    scale = np.sqrt(np.einsum("ij,ij->j", A, A)).max()
    perm, failed = _kernels.active.cpqr(A, k, TIE_RTOL, DEPENDENCE_RTOL * scale)
    if failed >= 0:
        raise RankDeficiencyError(
            f"matrix has numerical rank {failed} < {k} (pivoted QR stalled)")
    return IndexSelection.from_zero_based(perm, "qr-pivot")


def _power_norm(A, max_iter=1000, rtol=1e-9):
    n = A.shape[1]
    x = np.ones(n) + np.arange(n) / max(n, 1)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = A.T @ (A @ x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if abs(ny - lam) <= rtol * ny:
            lam = ny
            break
        lam = ny
    return float(np.sqrt(lam))


def spectral_norm(A):
    """Largest singular value; exact below the dense cutoff, power iteration above."""
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    if min(A.shape) <= DENSE_CUTOFF:
        return float(singular_values(A)[0])
    return _power_norm(A)


def subspace_angle(V1, V2):
    """Largest principal angle (radians) between Ran(V1) and Ran(V2).

    Uses arccos of the smallest cosine, switching to the arcsine of the
    residual norm for small angles where arccos loses accuracy.
    """
    V1 = as_matrix(V1, "V1")
    V2 = as_matrix(V2, "V2")
    if V1.shape != V2.shape:
        raise ValueError(f"shape mismatch {V1.shape} vs {V2.shape}")
    M = V1.T @ V2
    cos_min = float(np.clip(singular_values(M)[-1], 0.0, 1.0))
    if cos_min ** 2 > 0.5:
        sin_max = min(spectral_norm(V2 - V1 @ M), 1.0)
        return float(np.arcsin(sin_max))
    return float(np.arccos(cos_min))
