"""
Exception hierarchy shared by every funcscan app.

Two families, matching the CLI exit codes:

- DataError: the input is malformed or violates a precondition (exit 2).
- NumericalError: the input is well formed but the computation cannot be
  carried out stably (exit 3).

Library callers can catch the family they care about; the scan engine
catches NumericalError per SNP and downgrades it to a record status.
"""


class FuncScanError(Exception):
    """Base class for all funcscan errors."""

    exit_code = 1


class DataError(FuncScanError, ValueError):
    exit_code = 2


class NumericalError(FuncScanError, ArithmeticError):
    exit_code = 3


# --- data errors -------------------------------------------------------------

class InputFormatError(DataError):
    """A delimited input file could not be parsed."""

    def __init__(self, message, *, path=None, line=None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ''
        if self.path:
            where = f'{self.path}:{line}: ' if line is not None else f'{self.path}: '
        super().__init__(f'{where}{message}')


class GridMismatch(DataError):
    """Two curves or kernels live on different time grids."""


class InvalidKernel(DataError):
    pass


class SubjectTooSparse(DataError):
    """Raised when no subject has enough observations to be smoothed."""

    def __init__(self, message, *, subject_ids=()):
        self.subject_ids = tuple(subject_ids)
        super().__init__(message)


class DomainError(DataError):
    pass


class InsufficientSamples(DataError):
    pass


class TooManyComponents(DataError):
    pass


class InvalidWeights(DataError):
    pass


class UnsupportedSmoothness(DataError):
    pass


class DegenerateFactor(DataError):
    pass


# --- numerical errors --------------------------------------------------------

class IllConditionedBasis(NumericalError):
    pass


class RankDeficient(NumericalError):
    """The design matrix does not have full column rank."""

    def __init__(self, message, *, columns=()):
        self.columns = tuple(columns)
        super().__init__(message)


class SingularBlock(NumericalError):
    pass


class NumericallySingularCovariance(NumericalError):
    pass
