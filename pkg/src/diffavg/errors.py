"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: validation problems exit
with 2, numerical failures (solver or optimizer) with 3.
"""


class DiffavgError(Exception):
    """Base class for all package errors."""


class ValidationError(DiffavgError):
    """Invalid input data: bad shapes, non-finite values, broken invariants."""


class SpecMismatchError(ValidationError):
    """Operands live on different grids."""


class GridFileError(ValidationError):
    """A grid or field file failed to parse or validate."""


class NumericalError(DiffavgError):
    """A numerical procedure failed to reach its goal."""


class SolverError(NumericalError):
    """The linear solver failed to reach its residual tolerance."""
