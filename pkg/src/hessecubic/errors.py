"""Exception hierarchy shared by all modules."""


class HesseCubicError(Exception):
    """Base class for every error raised by this package."""


class NonconvergentSeries(HesseCubicError):
    """The theta series cannot converge (Im tau <= 0)."""


class OrderTooHigh(HesseCubicError):
    """Requested derivative order exceeds the double-precision guard (12)."""


class DegenerateProbe(HesseCubicError):
    """Every probe point for the modulus hit a zero of theta0*theta1*theta2."""


class InconsistentPsi(HesseCubicError):
    """The modulus disagrees across probe points (wrong theta basis)."""


class AllIndicesDegenerate(HesseCubicError):
    """All three theta denominators vanish at the requested argument."""


class InconsistentFactor(HesseCubicError):
    """The automorphy ratio disagrees across theta indices."""


class AllZero(HesseCubicError):
    """All three homogeneous coordinates are zero."""


class DenominatorZero(HesseCubicError):
    """A construction divided by a vanishing coordinate (point in E[3])."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class NotSquare(HesseCubicError):
    """Determinant of a non-square matrix."""


class SizeMismatch(HesseCubicError):
    """Matrix factorization partners of incompatible shape."""


class ZeroReference(HesseCubicError):
    """equal_up_to_scalar against the zero polynomial."""


class CalibrationFailed(HesseCubicError):
    """Per-offset scalars could not be fitted below tolerance."""


class IllConditioned(HesseCubicError):
    """A least-squares system lost rank."""
