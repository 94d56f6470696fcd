"""Exception types shared across the package."""

from __future__ import annotations


class PaircompError(Exception):
    """Base class for all package-specific errors."""


class DisconnectedGraph(PaircompError):
    """The comparison graph is not connected, so the result is undefined."""


class FordViolation(PaircompError):
    """The directed comparison graph is not strongly connected, so the
    maximum likelihood estimate does not exist or is not unique."""


class NoConvergence(PaircompError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class TooLarge(PaircompError):
    """Input exceeds the size bound of an exhaustive algorithm."""


class ParseError(PaircompError):
    """A file could not be parsed into a domain object."""


class BadHeader(ParseError):
    """The file header does not match the expected schema."""


class DuplicatePair(ParseError):
    """The same comparison pair appears more than once."""


class NegativeCount(ParseError):
    """A comparison count is negative."""


class NotReciprocal(ParseError):
    """Matrix entries a_ij and a_ji do not satisfy a_ji = 1/a_ij."""


class BadDiagonal(ParseError):
    """A diagonal matrix entry is missing or differs from 1."""


class NonPositiveEntry(ParseError):
    """A matrix entry is zero or negative."""


class MissingSlice(PaircompError):
    """A report was requested for a data slice that is not present."""
