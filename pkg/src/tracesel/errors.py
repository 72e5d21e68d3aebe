"""Exception types raised by tracesel.

The CLI maps each family onto a stable exit code, see ``cli.EXIT_CODES``.
"""


class TraceselError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(TraceselError, ValueError):
    pass


class DimensionMismatch(InvalidArgument):
    pass


class KOutOfRange(InvalidArgument):
    """Requested subset size lies outside the admissible range."""


class RankDeficient(InvalidArgument):
    pass


class NumericalError(TraceselError, ArithmeticError):
    """A floating point check failed while running a well-posed algorithm."""


class SingularMatrix(NumericalError):
    pass


class NotPsd(NumericalError):
    pass


class CapacitanceSingular(NumericalError):
    """Removing the block would leave a rank-deficient sum."""


class CertificateViolated(NumericalError):
    """No active candidate satisfies the averaging condition within tolerance."""


class NoCandidates(TraceselError):
    pass


class TooLarge(TraceselError):
    """Exhaustive enumeration would exceed the configured cap."""


class Infeasible(TraceselError):
    """No subset of the requested size gives a full-rank sum."""


class ParseError(TraceselError):
    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class EmptyFile(ParseError):
    pass


class ValidationFailed(TraceselError):
    """Carries the diagnostic summary of a failed problem validation."""

    def __init__(self, summary):
        self.summary = summary
        failed = [c for c in summary.checks if not c.passed]
        detail = "; ".join(f"{c.name}: {c.detail}" for c in failed)
        super().__init__(f"problem validation failed ({detail})")
