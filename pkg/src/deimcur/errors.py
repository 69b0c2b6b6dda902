"""Exception hierarchy.

``DataError`` covers numerical failures caused by the input (singular
submatrices, rank deficiency); the CLI maps it to exit code 2.
"""


class DeimCurError(Exception):
    pass


class DataError(DeimCurError, ValueError):
    pass


class SingularBasisError(DataError):
    """DEIM met a (numerically) singular basis at some step."""

    def __init__(self, step, msg=None):
        self.step = step
        super().__init__(msg or f"singular basis at step {step}")


class SingularSelectionError(DataError):
    """A selected square submatrix is numerically singular."""


class RankDeficiencyError(DataError):
    """Selected or pivoted columns/rows are numerically dependent."""


class MatrixMarketError(DeimCurError):
    """Base for Matrix Market parse failures."""


class MalformedHeaderError(MatrixMarketError):
    pass


class UnsupportedFieldError(MatrixMarketError):
    pass


class UnsupportedSymmetryError(MatrixMarketError):
    pass


class IndexOutOfRangeError(MatrixMarketError):
    pass


class MalformedDataError(MatrixMarketError):
    pass
