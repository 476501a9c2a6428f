"""Exception hierarchy. CLI exit codes are attached to each class."""


class RandprodError(Exception):
    exit_code = 1


class InvalidArgument(RandprodError, ValueError):
    exit_code = 2


class DomainError(InvalidArgument):
    """Point lies outside the half plane an operation is defined on."""


class ResourceLimitError(RandprodError):
    exit_code = 3


class NumericalFailure(RandprodError, ArithmeticError):
    exit_code = 4


class QuadratureError(NumericalFailure):
    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


class FitError(NumericalFailure):
    pass
