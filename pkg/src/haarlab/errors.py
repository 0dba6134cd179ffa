"""Exception types raised across the package."""


class HaarlabError(Exception):
    pass


class GroupMismatchError(HaarlabError, ValueError):
    """Operands belong to different groups (tag or dimension)."""


class AngleRangeError(HaarlabError, ValueError):
    pass


class SingularChartPointError(HaarlabError, ArithmeticError):
    """The Gram matrix of a chart is not positive definite at the requested point."""


class NonFiniteIntegrandError(HaarlabError, ArithmeticError):
    pass


class NumericalResolutionError(HaarlabError, ArithmeticError):
    """A quantity that must be an integer was not resolved to one."""


class CalibrationError(NumericalResolutionError):
    pass


class SingularGramError(HaarlabError, ArithmeticError):
    pass


class CostCapExceeded(HaarlabError, RuntimeError):
    pass


class CharacterSolveError(HaarlabError, RuntimeError):
    pass


class GroupFileError(HaarlabError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
