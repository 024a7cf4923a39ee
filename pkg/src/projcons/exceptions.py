"""Exception types raised by projcons."""


class SingularMatrixError(ArithmeticError):
    """Elimination found no usable pivot."""


class ConvergenceError(RuntimeError):
    """An iterative procedure hit its cap before meeting its tolerance."""


class EnumerationLimitError(ValueError):
    """Exhaustive forest enumeration was asked for a graph above the size guard."""


class TauRangeError(ValueError):
    """The step parameter violates ``0 < tau <= tau_max``."""


class GraphFormatError(ValueError):
    """A graph file could not be parsed.

    ``lineno`` is the 1-based line of the offending record, or ``None`` for
    structured documents and whole-file problems.
    """

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
