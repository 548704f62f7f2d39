"""Exception hierarchy.  ``JetError`` subclasses are domain errors (CLI exit 1)."""


class JetError(Exception):
    """Base class for domain errors."""


class MismatchError(JetError, ValueError):
    """Operands disagree on variable count, truncation order or size."""


class NonUnitError(JetError, ZeroDivisionError):
    """Inverting a series with zero constant term."""


class NonNilpotentError(JetError):
    """A vector field or operator that was required to be nilpotent is not."""


class NonUnipotentError(JetError):
    """A diffeomorphism or operator that was required to be unipotent is not."""


class NonStabilizationError(JetError):
    """The Dynkin series did not terminate within the word-length cap."""


class ClosureCapError(JetError):
    """Group enumeration exceeded its element cap."""


class NoFixedVectorError(JetError):
    """No common fixed vector: the input matrices do not form a unipotent set."""


class WitnessDiedError(JetError):
    """A derived-series witness vanished at the chosen truncation order."""


class VerificationError(Exception):
    """A verify run found a claim that does not hold (CLI exit 3)."""


class ParseError(Exception):
    """Syntax error with 1-based line/column position (CLI exit 2)."""

    def __init__(self, message, line=1, col=1, expected=()):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        where = f"{line}:{col}"
        if self.expected:
            message = f"{message} (expected one of: {', '.join(self.expected)})"
        super().__init__(f"{where}: {message}")
