"""DEIM-based CUR factorization with certified error bounds."""
from ._kernels import backend
from .baselines import (LeverageScores, leverage_scores, qr_cur_select, sample_select,
                        top_k_select)
from .cur import (CurFactorization, ErrorCertificate, SweepPoint, build_cur,
                  build_cur_interpolatory, build_cur_orthogonal, error_certificate,
                  one_sided_residuals, rank_sweep, select_indices)
from .deim import deim_select, interpolatory_project, selection_matrix_condition
from .densecore import (RankKSvd, column_pivoted_qr, dgks_orthogonalize, economy_svd,
                        singular_values, spectral_norm, subspace_angle, truncate_svd)
from .errors import (DataError, DeimCurError, MatrixMarketError, RankDeficiencyError,
                     SingularBasisError, SingularSelectionError)
from .incqr import IncrementalQR, approx_svd_from_qr, incremental_qr, iter_columns
from .selection import IndexSelection

__version__ = "0.1.0"
