"""Exception types shared across the package."""


class SzcharError(Exception):
    """Base class for all package-specific errors."""


class DegreeMismatch(SzcharError):
    """Two objects live over incompatible fields or index sets."""


class DivisionByZero(SzcharError):
    """Division by a zero field element or zero cyclotomic number."""


class ConductorTooLarge(SzcharError):
    """A cyclotomic operation would need a conductor above the configured bound."""


class ZeroTorusParameter(SzcharError):
    """A torus element or torus character was requested with a zero parameter."""


class NotInBorel(SzcharError):
    """A matrix expected to be upper triangular (Borel) is not."""


class ScaleExceeded(SzcharError):
    """An enumeration was requested at a parameter size that is not supported."""


class TableMismatch(SzcharError):
    """Two routes to the same table disagree."""


class RouteUnsupported(SzcharError):
    """The requested computation route is not implemented for these arguments."""


class TorusAmbiguity(SzcharError):
    """A torus class could not be assigned to a unique type."""


class DerivationMismatch(SzcharError):
    """An internal consistency check failed while deriving a character table."""


class NoSolutionInField(SzcharError):
    """A polynomial system has no solution in the working field."""


class SignRuleInconclusive(SzcharError):
    """A sign normalization rule did not single out a unique candidate."""
