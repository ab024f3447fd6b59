"""Exception taxonomy.

Two families matter to callers: ``DomainError`` for mathematically invalid
inputs or honest algorithmic failure (zero mass, no witness, residual out of
tolerance), and ``ParseError`` for malformed input files or expressions. The
command line maps them to distinct exit codes.
"""


class RecombineError(Exception):
    """Base class for all library errors."""


class DomainError(RecombineError):
    """The input is syntactically fine but mathematically unusable."""


class ZeroMassError(DomainError):
    """A measure with zero total mass was passed where positive mass is required."""


class EvaluationError(DomainError):
    """A function produced a non-finite or wrongly shaped value at a point."""


class ReductionError(DomainError):
    """Support reduction failed: no usable null direction, or residual out of tolerance."""


class NoWitnessError(DomainError):
    """No mean-value witness exists at the requested resolution."""


class ParseError(RecombineError):
    """An input file or expression does not match its documented format."""


class ExpressionError(ParseError):
    """A function expression uses syntax outside the supported language."""
