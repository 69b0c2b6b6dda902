"""Test-matrix generators: sparse nonnegative rank-one sums and the DEIM
growth example."""
from dataclasses import dataclass

import numpy as np

from .densecore import dgks_orthogonalize


@dataclass(frozen=True)
class SparseSumSpec:
    """``A = sum_j weights[j] * x_j y_j^T`` with sparse uniform(0,1) factors.

    Each entry of ``x_j`` (length ``m``) and ``y_j`` (length ``n``) is nonzero
    independently with probability ``density``.
    """

    m: int
    n: int
    density: float
    weights: tuple
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must lie in (0, 1]")
        w = tuple(float(x) for x in self.weights)
        if not w or any(x <= 0 for x in w):
            raise ValueError("weights must be a nonempty list of positive reals")
        if len(w) > min(self.m, self.n):
            raise ValueError(f"{len(w)} terms exceed min(m, n) = {min(self.m, self.n)}")
        object.__setattr__(self, "weights", w)


def harmonic_weights(lead, terms, lead_terms=10):
    """``lead/j`` for the first ``lead_terms`` terms, then ``1/j``."""
    j = np.arange(1, terms + 1, dtype=np.float64)
    return tuple(np.where(j <= lead_terms, lead / j, 1.0 / j))


def eq61_spec(m=2000, n=200, seed=0, density=0.025):
    """Moderate drop after the tenth singular value (weights 2/j, then 1/j)."""
    return SparseSumSpec(m, n, density, harmonic_weights(2.0, min(m, n)), seed)


def eq62_spec(m=2000, n=200, seed=0, density=0.025):
    """Sharp drop after the tenth singular value (weights 1000/j, then 1/j)."""
    return SparseSumSpec(m, n, density, harmonic_weights(1000.0, min(m, n)), seed)


def gen_sparse_sum(spec):
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    t = len(spec.weights)
    # draw masks then values, x factors before y factors
    X = np.where(rng.random((spec.m, t)) < spec.density, rng.random((spec.m, t)), 0.0)
    Y = np.where(rng.random((spec.n, t)) < spec.density, rng.random((spec.n, t)), 0.0)
    return (X * np.asarray(spec.weights)) @ Y.T


@dataclass(frozen=True)
class GrowthCase:
    m: int
    k: int
    L: np.ndarray
    V: np.ndarray


def growth_matrix(m, k):
    """Unit diagonal, -1 below it (and on every row past ``k``), 0 above."""
    L = -np.ones((m, k))
    L[np.triu_indices(k, 1)] = 0.0
    L[np.arange(k), np.arange(k)] = 1.0
    return L


def growth_case(m, k):
    """Orthonormal basis whose DEIM error constant grows like ``2**k``.

    ``V`` is the Q factor of unpivoted Gram-Schmidt on :func:`growth_matrix`.
    """
    if not m > k >= 1:
        raise ValueError(f"need m > k >= 1, got m={m}, k={k}")
    L = growth_matrix(m, k)
    V = np.zeros((m, k))
    for j in range(k):
        res = dgks_orthogonalize(V[:, :j], L[:, j])
        V[:, j] = res.q
    return GrowthCase(m, k, L, V)


def rank_k_matrix(m, n, k, seed=0):
    """Dense Gaussian product ``X @ Y.T`` of exact rank ``k`` (almost surely)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.standard_normal((m, k)) @ rng.standard_normal((n, k)).T
