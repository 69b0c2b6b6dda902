"""DEIM point selection and the interpolatory projector."""
import numpy as np

from . import _kernels
from .densecore import DEPENDENCE_RTOL, TIE_RTOL, as_matrix, singular_values
from .errors import SingularBasisError, SingularSelectionError
from .selection import IndexSelection, as_selection

__all__ = [
    "IndexSelection",
    "deim_select",
    "interpolatory_project",
    "selection_matrix_condition",
]


def deim_select(V, tie_rtol=TIE_RTOL):
    """Pick ``k`` distinct rows of the ``m x k`` basis ``V``, one per column.

    Step ``j`` interpolates column ``j`` at the rows already chosen and takes
    the row where the residual is largest in magnitude.  Magnitudes within
    ``tie_rtol`` (relative) of the maximum count as tied; the lowest row wins.

    Raises :class:`SingularBasisError` if a pivot or residual drops below
    ``1e3 * eps * max|V|``.
    """
    V = as_matrix(V, "V")
    m, k = V.shape
    if k > m:
        raise ValueError(f"need k <= m, got V of shape {V.shape}")
    if k == 0:
        return IndexSelection((), "deim")
    piv_tol = DEPENDENCE_RTOL * np.abs(V).max()
    p, failed = _kernels.active.deim(V, tie_rtol, piv_tol)
    if failed >= 0:
        raise SingularBasisError(failed + 1)
    return IndexSelection.from_zero_based(p, "deim")


def _selected_rows(V, p):
    V = as_matrix(V, "V")
    p = as_selection(p).check_bound(V.shape[0])
    sub = V[p.zero_based, :]
    if sub.shape[0] != sub.shape[1]:
        raise ValueError(f"need |p| == k, got {sub.shape[0]} rows for k={sub.shape[1]}")
    return V, p, sub


def selection_matrix_condition(V, p):
    """Error constant ``||V(p,:)^{-1}||_2 = 1 / sigma_min(V(p,:))``."""
    _, _, sub = _selected_rows(V, p)
    if sub.size == 0:
        return 1.0
    s = singular_values(sub)
    if s[-1] < DEPENDENCE_RTOL * s[0] or s[-1] == 0.0:
        raise SingularSelectionError(
            f"V(p,:) is numerically singular (sigma_min={s[-1]:.3g}, sigma_max={s[0]:.3g})")
    return float(1.0 / s[-1])


def interpolatory_project(V, p, x):
    """Apply ``V (P^T V)^{-1} P^T`` to ``x``; the result agrees with ``x`` on ``p``."""
    V, p, sub = _selected_rows(V, p)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != V.shape[0]:
        raise ValueError(f"x has {x.shape[0]} rows, V has {V.shape[0]}")
    try:
        selection_matrix_condition(V, p)
    except SingularSelectionError as exc:
        raise SingularSelectionError("projector undefined for this index set") from exc
    return V @ np.linalg.solve(sub, x[p.zero_based])
