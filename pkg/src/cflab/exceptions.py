"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: DataError -> 2,
ConvergenceError -> 3, usage problems -> 1.
"""


class CflabError(Exception):
    """Base class for all package errors."""


class DataError(CflabError, ValueError):
    """Invalid or inconsistent input data (bad votes, malformed files, ...)."""


class UndefinedStatisticError(DataError):
    """A statistic was requested on data that cannot define it (e.g. empty)."""


class ConvergenceError(CflabError, RuntimeError):
    """An iterative procedure failed to reach its tolerance.

    Carries whatever diagnostics the procedure achieved in ``details``.
    """

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details
