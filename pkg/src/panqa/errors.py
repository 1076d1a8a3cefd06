"""Exception hierarchy shared by the panqa modules.

The CLI maps InputError to exit code 2 and DegeneracyError to exit code 3.
"""


class PanqaError(Exception):
    """Base class for all panqa errors."""


class InputError(PanqaError):
    """Invalid input: bad files, shape mismatches, out-of-range arguments."""


class DegeneracyError(PanqaError):
    """Numeric degeneracy: zero variance, empty support, rank deficiency."""
