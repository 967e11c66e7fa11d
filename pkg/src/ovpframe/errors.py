"""Exception types raised across the package."""


class OVPFrameError(Exception):
    """Base class for every error raised by ovpframe."""


class DimensionMismatch(OVPFrameError, ValueError):
    pass


class IndexOutOfRange(OVPFrameError, IndexError):
    pass


class SingularOperator(OVPFrameError, ArithmeticError):
    """Raised when an operator fails the pivot or residual check.

    ``pivot`` carries the smallest pivot magnitude found during elimination
    (0.0 for an exactly singular matrix) and ``residual`` the max-norm
    residual of the computed inverse when it was available.
    """

    def __init__(self, message, pivot=0.0, residual=None):
        super().__init__(message)
        self.pivot = float(pivot)
        self.residual = residual


class NotAProjection(OVPFrameError, ValueError):
    pass


class BasisMismatch(OVPFrameError, ValueError):
    pass


class FactorizationMismatch(OVPFrameError, ValueError):
    pass


class GuaranteeUnavailable(OVPFrameError):
    pass


class PreconditionError(OVPFrameError, ValueError):
    """A named precondition of a construction does not hold."""

    def __init__(self, name, message):
        super().__init__(f"{name}: {message}")
        self.name = name


class NotOrthogonal(PreconditionError):
    def __init__(self, message="pair is not orthogonal"):
        super().__init__("orthogonality", message)


class NotApproxDual(PreconditionError):
    def __init__(self, message="pair is not certified approximately dual"):
        super().__init__("approximate_duality", message)


class NotSimilar(OVPFrameError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = float(residual)


class HypothesisNotCertified(OVPFrameError):
    """The hypothesis of a theorem could not be certified.

    This is not a falsification of the theorem; ``refuted`` is True only when
    sampling found an explicit violation of the hypothesis inequality.
    """

    def __init__(self, message, refuted=False, report=None):
        super().__init__(message)
        self.refuted = refuted
        self.report = report


class SchemaError(OVPFrameError, ValueError):
    def __init__(self, field, message, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}: {message}{where}")
        self.field = field
        self.line = line


class GuaranteeViolated(OVPFrameError, AssertionError):
    """A proven bound failed numerically; indicates a bug, never expected."""
