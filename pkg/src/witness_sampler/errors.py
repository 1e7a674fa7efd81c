"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Shapes or sizes of inputs do not match."""


class ParseError(ValueError):
    """A text artifact could not be parsed; carries the 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class ValidationError(ValueError):
    """A structural invariant failed; message names the invariant."""


class SingularMatrixError(ArithmeticError):
    """LU elimination hit a negligible pivot; carries the pivot index."""

    def __init__(self, pivot_index):
        self.pivot_index = pivot_index
        super().__init__("singular matrix: negligible pivot at index %d"
                         % pivot_index)


class RankDeficiencyError(ArithmeticError):
    """Orthonormalization or basis construction lost rank."""


class OrthonormalityError(ValueError):
    """A matrix expected to have orthonormal columns does not."""


class DegeneracyError(ValueError):
    """Restriction of a system to a line produced a lower-degree polynomial.

    Happens when the direction vector kills the leading form, e.g. a line
    parallel to an asymptotic direction of the hypersurface.
    """


class ConvergenceError(ArithmeticError):
    """An iteration failed to converge; may carry residuals."""

    def __init__(self, message, residuals=None):
        self.residuals = residuals
        super().__init__(message)


class StepSizeError(ArithmeticError):
    """Stepsize control drove the step below the admissible minimum."""


class AlreadyOnPlane(Exception):
    """Predictor signal: the point already lies on the target plane."""

    def __init__(self, distance):
        self.distance = distance
        super().__init__("point already on target plane (distance %.3e)"
                         % distance)


class PathFailureError(ArithmeticError):
    """One or more continuation paths failed.

    Carries the failing path indices and, for single-path failures, the
    partial tracking statistics collected before the failure.
    """

    def __init__(self, message, indices=(), stats=None):
        self.indices = tuple(indices)
        self.stats = stats
        super().__init__(message)


class PathCrossingError(ValidationError):
    """Two tracked paths converged to the same endpoint."""
