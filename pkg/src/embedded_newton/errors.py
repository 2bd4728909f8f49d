"""Exception hierarchy shared by every layer of the package."""


class EmbeddedNewtonError(Exception):
    """Base class for all numerical failures raised by this package."""


class DegenerateConstraints(EmbeddedNewtonError):
    """The constraint gradients are (numerically) linearly dependent."""


class FrameMismatch(EmbeddedNewtonError):
    """A tangent frame is not tangent, or not independent, at its anchor."""


class SingularSystem(EmbeddedNewtonError):
    """The Newton system is inconsistent (least-squares residual too large)."""


class LeftDomain(EmbeddedNewtonError):
    """An iterate violated the problem's domain guard."""


class NearChartPole(EmbeddedNewtonError):
    """A point is too close to the projection pole of a stereographic chart."""


class ZeroVector(EmbeddedNewtonError):
    """A retraction block landed at the origin and cannot be normalized."""


class SingularConfiguration(LeftDomain):
    """Two points collide, so the pair energy is undefined."""


class NoRoot(EmbeddedNewtonError):
    """A scalar root-finder could not bracket a sign change."""


class NotPresent(EmbeddedNewtonError):
    """The requested critical family does not exist at this exponent."""


class NotCritical(EmbeddedNewtonError):
    """The configuration is not a critical point within tolerance."""
