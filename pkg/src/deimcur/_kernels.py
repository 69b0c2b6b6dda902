"""Hot numeric loops, in a numba flavour and a pure-numpy flavour.

The numba versions are used unless ``DEIMCUR_DISABLE_NUMBA`` is set to a
truthy value (or numba cannot be imported).  Both flavours follow the same
contract so either can back the public API; ``NUMBA`` and ``NUMPY`` expose
them side by side for tests and benchmarks.

Every kernel returns plain arrays and integer status codes instead of raising,
since numba-compiled code cannot raise our exception types.
"""
import math
import os
from types import SimpleNamespace

import numpy as np

EPS = float(np.finfo(np.float64).eps)

_FLAG = os.environ.get("DEIMCUR_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


# ---------------------------------------------------------------------------
# one-sided Jacobi
# ---------------------------------------------------------------------------

def _rotation(alpha, beta, gamma):
    # cos/sin making columns i, j orthogonal; see Hestenes' method
    zeta = (beta - alpha) / (2.0 * gamma)
    if abs(zeta) > 1e150:
        t = 0.5 / zeta
    else:
        t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, c * t


def jacobi_numpy(B, W, tol, max_sweeps):
    """Round-robin (parallel ordering) one-sided Jacobi, vectorised per round.

    ``B`` is rotated in place until its columns are mutually orthogonal; the
    same rotations are applied to ``W`` unless it is ``None``.  Returns the
    number of sweeps used, or -1 if ``max_sweeps`` was exhausted.
    """
    n = B.shape[1]
    if n < 2:
        return 0
    # columns below eps*||B||_F are noise; rotating them against a parallel
    # partner never converges
    floor = (EPS * EPS) * float(np.einsum("ij,ij->", B, B))
    players = list(range(n)) + ([-1] if n % 2 else [])
    half = len(players) // 2
    for sweep in range(max_sweeps):
        rotated = False
        for _ in range(len(players) - 1):
            pairs = [(players[i], players[-1 - i]) for i in range(half)]
            pairs = [(min(a, b), max(a, b)) for a, b in pairs if a >= 0 and b >= 0]
            I = np.array([a for a, _ in pairs])
            J = np.array([b for _, b in pairs])
            Bi = B[:, I]
            Bj = B[:, J]
            alpha = np.einsum("ij,ij->j", Bi, Bi)
            beta = np.einsum("ij,ij->j", Bj, Bj)
            gamma = np.einsum("ij,ij->j", Bi, Bj)
            active = ((gamma != 0.0) & (np.minimum(alpha, beta) > floor)
                      & (np.abs(gamma) > tol * np.sqrt(alpha) * np.sqrt(beta)))
            if active.any():
                rotated = True
                g = np.where(active, gamma, 1.0)
                zeta = (beta - alpha) / (2.0 * g)
                big = np.abs(zeta) > 1e150
                zs = np.where(big, 1.0, zeta)
                t = np.where(big, 0.5 / np.where(big, zeta, 1.0),
                             np.copysign(1.0, zs) / (np.abs(zs) + np.sqrt(1.0 + zs * zs)))
                c = np.where(active, 1.0 / np.sqrt(1.0 + t * t), 1.0)
                s = np.where(active, c * t, 0.0)
                B[:, I] = c * Bi - s * Bj
                B[:, J] = s * Bi + c * Bj
                if W is not None:
                    Wi = W[:, I]
                    Wj = W[:, J]
                    W[:, I] = c * Wi - s * Wj
                    W[:, J] = s * Wi + c * Wj
            players = [players[0], players[-1]] + players[1:-1]
        if not rotated:
            return sweep + 1
    return -1


def _jacobi_serial(B, W, want_w, tol, max_sweeps):
    # cyclic-by-rows ordering; compiled by numba below
    m, n = B.shape
    nw = W.shape[0]
    floor = 0.0
    for r in range(m):
        for c in range(n):
            floor += B[r, c] * B[r, c]
    floor *= EPS * EPS
    for sweep in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for r in range(m):
                    a = B[r, i]
                    b = B[r, j]
                    alpha += a * a
                    beta += b * b
                    gamma += a * b
                if gamma == 0.0 or min(alpha, beta) <= floor:
                    continue
                if abs(gamma) <= tol * math.sqrt(alpha) * math.sqrt(beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                for r in range(m):
                    a = B[r, i]
                    b = B[r, j]
                    B[r, i] = c * a - s * b
                    B[r, j] = s * a + c * b
                if want_w:
                    for r in range(nw):
                        a = W[r, i]
                        b = W[r, j]
                        W[r, i] = c * a - s * b
                        W[r, j] = s * a + c * b
        if not rotated:
            return sweep + 1
    return -1


# ---------------------------------------------------------------------------
# DEIM index selection
# ---------------------------------------------------------------------------

def _first_near_max(x, tie_rtol):
    mx = 0.0
    for i in range(x.shape[0]):
        v = abs(x[i])
        if v > mx:
            mx = v
    cut = mx * (1.0 - tie_rtol)
    for i in range(x.shape[0]):
        if abs(x[i]) >= cut:
            return i, mx
    return 0, mx


def _deim_serial(V, tie_rtol, piv_tol):
    m, k = V.shape
    p = np.zeros(k, dtype=np.int64)
    idx, mx = _first_near_max(V[:, 0], tie_rtol)
    if mx <= piv_tol:
        return p, 0
    p[0] = idx
    M = np.empty((k, k))
    c = np.empty(k)
    r = np.empty(m)
    for j in range(1, k):
        # fresh partial-pivot elimination on V(p, 0:j) c = V(p, j)
        for a in range(j):
            for b in range(j):
                M[a, b] = V[p[a], b]
            c[a] = V[p[a], j]
        for col in range(j):
            piv = col
            best = abs(M[col, col])
            for row in range(col + 1, j):
                if abs(M[row, col]) > best:
                    best = abs(M[row, col])
                    piv = row
            if best <= piv_tol:
                return p, j
            if piv != col:
                for b in range(j):
                    tmp = M[col, b]
                    M[col, b] = M[piv, b]
                    M[piv, b] = tmp
                tmp = c[col]
                c[col] = c[piv]
                c[piv] = tmp
            for row in range(col + 1, j):
                f = M[row, col] / M[col, col]
                for b in range(col, j):
                    M[row, b] -= f * M[col, b]
                c[row] -= f * c[col]
        for a in range(j - 1, -1, -1):
            acc = c[a]
            for b in range(a + 1, j):
                acc -= M[a, b] * c[b]
            c[a] = acc / M[a, a]
        for i in range(m):
            acc = V[i, j]
            for b in range(j):
                acc -= V[i, b] * c[b]
            r[i] = acc
        idx, mx = _first_near_max(r, tie_rtol)
        if mx <= piv_tol:
            return p, j
        p[j] = idx
    return p, -1


def deim_numpy(V, tie_rtol, piv_tol):
    """DEIM selection with numpy linear algebra; same contract as the numba kernel.

    Returns ``(p, failed_step)`` with 0-based indices; ``failed_step`` is -1 on
    success, otherwise the 0-based step whose pivot or residual vanished.
    """
    m, k = V.shape
    p = np.zeros(k, dtype=np.int64)
    mag = np.abs(V[:, 0])
    mx = mag.max() if m else 0.0
    if mx <= piv_tol:
        return p, 0
    p[0] = int(np.flatnonzero(mag >= mx * (1.0 - tie_rtol))[0])
    for j in range(1, k):
        M = V[p[:j], :j].copy()
        c = V[p[:j], j].copy()
        # partial-pivot elimination, kept explicit so singular pivots are visible
        for col in range(j):
            piv = col + int(np.argmax(np.abs(M[col:, col])))
            if abs(M[piv, col]) <= piv_tol:
                return p, j
            if piv != col:
                M[[col, piv]] = M[[piv, col]]
                c[[col, piv]] = c[[piv, col]]
            f = M[col + 1:, col] / M[col, col]
            M[col + 1:, col:] -= np.outer(f, M[col, col:])
            c[col + 1:] -= f * c[col]
        for a in range(j - 1, -1, -1):
            c[a] = (c[a] - M[a, a + 1:] @ c[a + 1:]) / M[a, a]
        r = V[:, j] - V[:, :j] @ c
        mag = np.abs(r)
        mx = mag.max()
        if mx <= piv_tol:
            return p, j
        p[j] = int(np.flatnonzero(mag >= mx * (1.0 - tie_rtol))[0])
    return p, -1


# ---------------------------------------------------------------------------
# column-pivoted Gram-Schmidt QR (pivots only)
# ---------------------------------------------------------------------------

def _cpqr_serial(A, k, tie_rtol, dep_tol):
    m, n = A.shape
    X = A.copy()
    perm = np.zeros(k, dtype=np.int64)
    taken = np.zeros(n, dtype=np.bool_)
    norms = np.zeros(n)
    q = np.empty(m)
    for step in range(k):
        mx = 0.0
        for col in range(n):
            if taken[col]:
                continue
            acc = 0.0
            for i in range(m):
                acc += X[i, col] * X[i, col]
            norms[col] = math.sqrt(acc)
            if norms[col] > mx:
                mx = norms[col]
        if mx <= dep_tol:
            return perm, step
        piv = -1
        for col in range(n):
            if not taken[col] and norms[col] >= mx * (1.0 - tie_rtol):
                piv = col
                break
        perm[step] = piv
        taken[piv] = True
        for i in range(m):
            q[i] = X[i, piv] / norms[piv]
        # two modified Gram-Schmidt passes against the new direction
        for _ in range(2):
            for col in range(n):
                if taken[col]:
                    continue
                d = 0.0
                for i in range(m):
                    d += q[i] * X[i, col]
                for i in range(m):
                    X[i, col] -= d * q[i]
    return perm, -1


def cpqr_numpy(A, k, tie_rtol, dep_tol):
    """First ``k`` pivots of column-pivoted Gram-Schmidt QR.

    Returns ``(perm, failed_step)``, 0-based, ``failed_step == -1`` on success.
    """
    X = np.array(A, dtype=np.float64, copy=True)
    n = X.shape[1]
    perm = np.zeros(k, dtype=np.int64)
    free = np.ones(n, dtype=bool)
    for step in range(k):
        norms = np.where(free, np.sqrt(np.einsum("ij,ij->j", X, X)), -1.0)
        mx = norms.max()
        if mx <= dep_tol:
            return perm, step
        piv = int(np.flatnonzero(norms >= mx * (1.0 - tie_rtol))[0])
        perm[step] = piv
        free[piv] = False
        q = X[:, piv] / norms[piv]
        for _ in range(2):
            X[:, free] -= np.outer(q, q @ X[:, free])
    return perm, -1


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _jacobi_entry_numpy(B, W, tol, max_sweeps):
    return jacobi_numpy(B, W, tol, max_sweeps)


NUMPY = SimpleNamespace(
    name="numpy",
    jacobi=_jacobi_entry_numpy,
    deim=deim_numpy,
    cpqr=cpqr_numpy,
)

if numba is not None:
    _jacobi_nb = numba.njit(cache=True)(_jacobi_serial)
    _first_near_max = numba.njit(cache=True)(_first_near_max)
    _deim_nb = numba.njit(cache=True)(_deim_serial)
    _cpqr_nb = numba.njit(cache=True)(_cpqr_serial)

    def _jacobi_entry_numba(B, W, tol, max_sweeps):
        if W is None:
            return _jacobi_nb(B, np.empty((0, B.shape[1])), False, tol, max_sweeps)
        return _jacobi_nb(B, W, True, tol, max_sweeps)

    def _deim_entry_numba(V, tie_rtol, piv_tol):
        return _deim_nb(np.ascontiguousarray(V, dtype=np.float64), tie_rtol, piv_tol)

    def _cpqr_entry_numba(A, k, tie_rtol, dep_tol):
        return _cpqr_nb(np.asfortranarray(A, dtype=np.float64), k, tie_rtol, dep_tol)

    NUMBA = SimpleNamespace(
        name="numba",
        jacobi=_jacobi_entry_numba,
        deim=_deim_entry_numba,
        cpqr=_cpqr_entry_numba,
    )
else:  # pragma: no cover
    NUMBA = None

active = NUMPY if (NUMBA_DISABLED or NUMBA is None) else NUMBA


def backend():
    """Name of the kernel flavour in use (``"numba"`` or ``"numpy"``)."""
    return active.name
