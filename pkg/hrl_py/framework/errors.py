"""
Exceptions raised by hrl_py.

Every exception derives from :class:`HRLError` and from the builtin that
matches the condition, so ``except ValueError`` keeps working for callers
that do not know about this module. Accuracy problems are *not* exceptions;
they are carried as boolean flags on results.
"""


class HRLError(Exception):
    """Base class for all errors raised by hrl_py."""


class DomainError(HRLError, ValueError):
    """A point lies outside the domain an operation is defined on."""


class UnsupportedDimensionError(DomainError):
    """Raised for dimensions outside the supported range."""

    def __init__(self, n, supported=(2, 3, 4)):
        super().__init__(
            "Dimension %s is not supported (expected one of %s)" % (n, supported)
        )
        self.n = n


class QuadratureError(HRLError, ArithmeticError):
    """A quadrature integrand returned a non-finite value."""

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class DegenerateJacobianError(HRLError, ArithmeticError):
    """The smallest singular value of a Jacobian is numerically zero."""

    def __init__(self, point, sigma_min):
        super().__init__(
            "Degenerate Jacobian at x=%s (sigma_min=%.3e)" % (list(point), sigma_min)
        )
        self.point = point
        self.sigma_min = sigma_min


class NotSelfMapError(HRLError, ValueError):
    """A map expected to send the unit ball into itself does not."""

    def __init__(self, point, image_norm):
        super().__init__(
            "Map is not a self-map of the ball: |f(x)| = %.12g at x=%s"
            % (image_norm, list(point))
        )
        self.point = point
        self.image_norm = image_norm


class ChartMismatchError(HRLError, ValueError):
    """Boundary data leaves the graph of the chart it is checked against."""


class ConfigurationError(HRLError, ValueError):
    """Missing or inconsistent configuration."""


class EmptySampleError(HRLError, ValueError):
    """A sampler produced no pairs to estimate from."""
