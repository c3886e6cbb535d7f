"""Exception hierarchy shared by the CLI and the HTTP routers.

Every error carries the process exit code the CLI reports for it:
0 ok, 2 configuration, 3 data, 4 numerical.
"""


class PeakSharpError(Exception):
    exit_code = 1


class ConfigError(PeakSharpError, ValueError):
    exit_code = 2


class DomainError(ConfigError):
    """A parameter lies outside its mathematical domain (w <= 0, k < 0, ...)."""


class DataError(PeakSharpError, ValueError):
    exit_code = 3


class SizeError(DataError):
    pass


class DimensionError(DataError):
    pass


class NotFoundError(DataError):
    pass


class EmptyDataError(DataError):
    pass


class SelectionError(DataError):
    def __init__(self, message: str, found: int = 0):
        super().__init__(message)
        self.found = found


class NumericalError(PeakSharpError, ArithmeticError):
    exit_code = 4


class IterationLimitError(NumericalError):
    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


class RankError(NumericalError):
    pass


class SingularMatrixError(NumericalError):
    pass
