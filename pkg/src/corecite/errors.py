"""Exception hierarchy shared by all corecite modules."""

from __future__ import annotations


class CorecitError(Exception):
    """Base class for errors raised by corecite."""


class ConfigurationError(CorecitError, ValueError):
    """A parameter is outside its documented range or inputs are inconsistent."""


class ParseError(CorecitError, ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class EmptyNetworkError(CorecitError, ValueError):
    """The input yields a citation network without edges."""


class UnknownSourceError(CorecitError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class UndefinedModularityError(CorecitError, ArithmeticError):
    """Modularity is undefined on a network with zero total weight."""


class ContractViolation(CorecitError, ValueError):
    """Inputs that must describe the same source or partition do not."""


class EmptySummaryError(CorecitError, ValueError):
    """No defined indicator values are available to summarise."""
