"""CUR assembly, a-posteriori error certificates and rank sweeps."""
import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .baselines import leverage_scores, qr_cur_select, sample_select, top_k_select
from .deim import deim_select, selection_matrix_condition
from .densecore import (DEPENDENCE_RTOL, as_matrix, singular_values,
                        spectral_norm, truncate_svd)
from .errors import DeimCurError, RankDeficiencyError, SingularSelectionError
from .selection import as_selection

log = logging.getLogger(__name__)

VARIANTS = ("interpolatory", "orthogonal")
METHODS = ("deim", "ls-top", "ls-sample", "qr")


@dataclass(frozen=True)
class CurFactorization:
    p: object
    q: object
    C: np.ndarray
    U: np.ndarray
    R: np.ndarray
    variant: str

    @property
    def k(self):
        return self.U.shape[0]

    def product(self):
        return self.C @ (self.U @ self.R)


@dataclass(frozen=True)
class ErrorCertificate:
    eta_p: float
    eta_q: float
    sigma_next: float
    bound: float
    observed_error: float
    exact_svd: bool = True

    @property
    def ratio(self):
        """observed_error / sigma_next (inf when sigma_next is 0)."""
        if self.sigma_next == 0.0:
            return float("inf") if self.observed_error else 0.0
        return self.observed_error / self.sigma_next

    def holds(self, slack=0.0):
        return self.observed_error <= self.bound + slack


def _pick(A, p, q):
    A = as_matrix(A)
    m, n = A.shape
    p = as_selection(p).check_bound(m)
    q = as_selection(q).check_bound(n)
    if len(p) != len(q):
        raise ValueError(f"|p|={len(p)} differs from |q|={len(q)}")
    if len(p) > min(m, n):
        raise ValueError(f"k={len(p)} exceeds min(m, n)={min(m, n)}")
    return A, p, q, A[:, q.zero_based], A[p.zero_based, :]


def _is_singular(M):
    s = singular_values(M)
    return s.size == 0 or s[-1] == 0.0 or s[-1] < DEPENDENCE_RTOL * s[0]


def build_cur_interpolatory(A, p, q):
    """``U = A(p,q)^{-1}``: the product reproduces A on rows ``p`` and columns ``q``."""
    A, p, q, C, R = _pick(A, p, q)
    core = A[np.ix_(p.zero_based, q.zero_based)]
    if _is_singular(core):
        raise SingularSelectionError("interpolatory U undefined: A(p,q) is singular")
    U = np.linalg.solve(core, np.eye(core.shape[0]))
    return CurFactorization(p, q, C, U, R, "interpolatory")


def build_cur_orthogonal(A, p, q):
    """``U = C^+ A R^+``, formed from thin QR factors of ``C`` and ``R^T``."""
    A, p, q, C, R = _pick(A, p, q)
    Qc, Tc = np.linalg.qr(C)
    Qr, Tr = np.linalg.qr(R.T)
    if _is_singular(Tc) or _is_singular(Tr):
        raise RankDeficiencyError("selected columns/rows dependent")
    core = Qc.T @ A @ Qr
    U = np.linalg.solve(Tc, core)
    U = np.linalg.solve(Tr, U.T).T
    return CurFactorization(p, q, C, U, R, "orthogonal")


def build_cur(A, p, q, variant="orthogonal"):
    if variant == "orthogonal":
        return build_cur_orthogonal(A, p, q)
    if variant == "interpolatory":
        return build_cur_interpolatory(A, p, q)
    raise ValueError(f"unknown variant {variant!r}")


def one_sided_residuals(A, svd):
    """``(||A (I - W W^T)||, ||(I - V V^T) A||)`` for (approximate) singular vectors."""
    A = as_matrix(A)
    right = A - (A @ svd.W) @ svd.W.T
    left = A - svd.V @ (svd.V.T @ A)
    return spectral_norm(right), spectral_norm(left)


def error_certificate(A, svd, p, q, cur):
    """Error constants, ``(eta_p + eta_q) * sigma_next`` and the observed 2-norm error.

    For an exact SVD ``sigma_next`` is its residual estimate (sigma_{k+1});
    for approximate factors it is the larger of the two one-sided residuals.
    """
    A = as_matrix(A)
    p = as_selection(p)
    q = as_selection(q)
    if svd.k != len(p) or svd.k != len(q):
        raise ValueError(f"svd has k={svd.k}, selections have {len(p)} and {len(q)}")
    eta_p = selection_matrix_condition(svd.V, p)
    eta_q = selection_matrix_condition(svd.W, q)
    if svd.exact:
        sigma_next = float(svd.residual_estimate)
    else:
        sigma_next = max(one_sided_residuals(A, svd))
    observed = spectral_norm(A - cur.product())
    cert = ErrorCertificate(eta_p, eta_q, sigma_next, (eta_p + eta_q) * sigma_next,
                            observed, svd.exact)
    if cur.variant == "orthogonal" and not cert.holds(1e-8 * np.linalg.norm(A)):
        log.warning("CUR error %.3e exceeds certified bound %.3e", observed, cert.bound)
    return cert


def select_indices(A, svd, method, k, seed=0, lev_r=None):
    """Row and column selections of size ``k`` by one of :data:`METHODS`.

    ``svd`` must carry at least ``k`` singular vectors (``lev_r`` of them for
    the leverage-score methods).
    """
    if method == "deim":
        return deim_select(svd.V[:, :k]), deim_select(svd.W[:, :k])
    if method in ("ls-top", "ls-sample"):
        if lev_r is None:
            raise ValueError(f"method {method} needs lev_r (number of singular vectors)")
        rows = leverage_scores(svd.V, lev_r)
        cols = leverage_scores(svd.W, lev_r)
        if method == "ls-top":
            return top_k_select(rows, k), top_k_select(cols, k)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k])))
        return sample_select(rows, k, rng), sample_select(cols, k, rng)
    if method == "qr":
        return qr_cur_select(A, k)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class SweepPoint:
    k: int
    method: str
    certificate: Optional[ErrorCertificate]
    elapsed_ms: float
    error: Optional[str] = None


def rank_sweep(A, svd, method, k_max, seed=0, lev_r=None, variant="orthogonal"):
    """Certify CUR approximations for ``k = 1..k_max`` selected by ``method``.

    A failing ``k`` is recorded with its error message and the sweep goes on.
    """
    A = as_matrix(A)
    if not 1 <= k_max <= svd.k:
        raise ValueError(f"k_max={k_max} must lie in 1..{svd.k}")
    out = []
    for k in range(1, k_max + 1):
        t0 = time.perf_counter()
        try:
            sk = truncate_svd(svd, k)
            p, q = select_indices(A, svd, method, k, seed, lev_r)
            cur = build_cur(A, p, q, variant)
            cert = error_certificate(A, sk, p, q, cur)
            err = None
        except DeimCurError as exc:
            cert, err = None, f"{type(exc).__name__}: {exc}"
        out.append(SweepPoint(k, method, cert, 1e3 * (time.perf_counter() - t0), err))
    return out
