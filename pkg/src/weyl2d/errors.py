"""Exception hierarchy shared by all modules."""


class Weyl2DError(Exception):
    """Base class for every error raised by this package."""


class DomainError(Weyl2DError, ValueError):
    """A point (or a finite-difference stencil point) lies outside a field's domain."""


class PoleError(DomainError):
    """Evaluation at a pole of a rational function or Mobius map."""


class SingularPointError(DomainError):
    """Evaluation too close to the singular set of a Weyl structure."""


class DegenerateError(Weyl2DError, ValueError):
    """A degenerate input: singular Mobius matrix, vanishing denominator of a ratio."""


class ChartBoundaryError(DomainError):
    """Coordinates outside the validity region of a compact-family chart."""


class BorderlineError(Weyl2DError, ValueError):
    """Family parameters that are neither sphere nor torus cases."""
