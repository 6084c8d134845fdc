"""Exception types raised across the package."""


class FracGcgError(Exception):
    """Base class for all package errors."""


class GridMismatch(FracGcgError, ValueError):
    pass


class InvalidGrid(FracGcgError, ValueError):
    pass


class NonHermitian(FracGcgError, ValueError):
    pass


class ParamOutOfRange(FracGcgError, ValueError):
    pass


class ZeroInput(FracGcgError, ValueError):
    pass


class InfiniteSeminorm(FracGcgError, ValueError):
    pass


class ZeroResidual(FracGcgError):
    """The residual vanishes, so there is nothing left to insert."""


class ConfigInvalid(FracGcgError, ValueError):
    pass


class GridTooSmall(FracGcgError, ValueError):
    pass


class BadPeriod(FracGcgError, ValueError):
    pass


class NotConverged(FracGcgError):
    """The quadratic weight solver hit its iteration cap.

    Carries the best iterate found and its KKT violation so callers can
    decide whether it is usable.
    """

    def __init__(self, max_iter, weights, kkt_violation):
        super().__init__(
            f"NNLS did not converge in {max_iter} iterations "
            f"(KKT violation {kkt_violation:.3e})"
        )
        self.max_iter = max_iter
        self.weights = weights
        self.kkt_violation = kkt_violation
