# errors.py

from typing import Optional


class CurveboundError(Exception):
    """Base class for all errors raised by curvebound"""

    exit_code = 1


class SchemaError(CurveboundError):
    """Malformed scenario or settings document"""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(field)
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class DomainError(CurveboundError):
    """Argument outside the domain of an operation (t <= 0, E >= 0, ...)"""

    exit_code = 2


class SchemeError(CurveboundError):
    """Renormalization scheme incompatible with the system or backend"""

    exit_code = 2


class GeometryError(CurveboundError):
    exit_code = 3


class InvalidPointError(GeometryError):
    """Point outside the chart of a manifold backend"""


class CoincidenceError(GeometryError):
    """Kernel requested at coincident points"""


class GeometryViolationError(GeometryError):
    """Curve data violates the embedding hypotheses (self-intersection, ...)"""


class IntersectionError(GeometryViolationError):
    """Two curves of a system intersect"""


class ClosureError(GeometryViolationError):
    """Sampled curve is not closed"""


class ResolutionError(GeometryError):
    """Node resolution too coarse to certify a geometric property"""


class TruncationError(CurveboundError):
    """Image sum did not converge within the allowed number of shells"""

    def __init__(self, message: str, tail_bound: float):
        self.tail_bound = tail_bound
        super().__init__(f"{message} (tail bound {tail_bound:.3e})")


class NoBoundStateError(CurveboundError):
    """No sign change of the lowest eigenvalue in the configured energy range"""

    exit_code = 4


class FlowSingularityError(CurveboundError):
    """Coupling flow crosses its pole"""

    exit_code = 4

    def __init__(self, message: str, tau_pole: float):
        self.tau_pole = tau_pole
        super().__init__(f"{message} (pole at tau={tau_pole:.6g})")


class InvariantViolationError(CurveboundError):
    """A structural invariant failed; indicates a numerical defect"""

    exit_code = 5


# Raised by numpy/scipy routines; callers report them with the generic exit code
NUMERICAL_FAILURES = (ArithmeticError, RuntimeError, ValueError)
