"""Exceptions raised by the solvers and the graph layer."""

from .mpfloat import DivisionByZero, MPParseError, SignDisciplineError


class EscapeError(Exception):
    """Base class for graph and solver errors."""


class InvalidQuery(EscapeError, ValueError):
    """Bad (t, p) pair or out-of-range vertex id."""


class GraphFormatError(EscapeError, ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class ZeroOutDegree(EscapeError):
    pass


class SingularError(EscapeError, ArithmeticError):
    """The system has no inverse: some vertex cannot reach t, p or the dummy."""


class UnsupportedForBound(EscapeError):
    """No hitting-time bound is available for this input; pass an explicit override."""


__all__ = [
    "EscapeError",
    "InvalidQuery",
    "GraphFormatError",
    "ZeroOutDegree",
    "SingularError",
    "UnsupportedForBound",
    "SignDisciplineError",
    "DivisionByZero",
    "MPParseError",
]
