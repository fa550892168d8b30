"""Exception hierarchy.

``InputError`` covers bad user input (CLI exit code 2); ``NumericalError``
covers failures of an otherwise valid computation (exit code 3).
"""


class RydctlError(Exception):
    pass


class InputError(RydctlError, ValueError):
    pass


class NumericalError(RydctlError, ArithmeticError):
    pass


class NearPole(NumericalError):
    pass


class AboveThreshold(InputError):
    pass


class Degenerate(NumericalError):
    pass


class PoleOutsideWindow(InputError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class NonPhysicalState(NumericalError):
    pass


class TargetUnreachable(NumericalError):
    pass


class ZeroShift(InputError):
    pass


class Infeasible(NumericalError):
    pass


class NotConverged(NumericalError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ParseError(InputError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateAbscissa(InputError):
    pass


class EmptyDataset(InputError):
    pass
