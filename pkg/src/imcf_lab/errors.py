"""Exception hierarchy for imcf_lab."""


class IMCFLabError(Exception):
    """Base class for every error raised by this package."""


class RadiusOutOfDomain(IMCFLabError, ValueError):
    """A radius lies at or inside the profile's admissible lower bound."""


class PoleSingularity(IMCFLabError, ValueError):
    """A quantity was requested exactly at a coordinate pole."""


class NonGraphical(IMCFLabError):
    """The leaf is too steep to be written as a radial graph."""


class GridMismatch(IMCFLabError, ValueError):
    """Samples and grid (or two lattices) do not agree."""


class FlowBreakdown(IMCFLabError):
    """The flow left the smooth regime (H <= 0, steep graph, horizon)."""


class StepTooLarge(IMCFLabError):
    """A single time step violated the area-growth guard."""


class NoConvergence(IMCFLabError):
    """The area law could not be met after the allowed step halvings."""


class SupportViolation(IMCFLabError, ValueError):
    """A test function does not vanish near the ends of its time window."""


class NotEnoughTimeNodes(IMCFLabError, ValueError):
    """A time derivative was requested on too few time nodes."""


class InterpolationDegenerate(IMCFLabError, ZeroDivisionError):
    """First derivative is nonzero while the second vanishes."""


class CaseMassMismatch(IMCFLabError, ValueError):
    """Mass parameter incompatible with the requested prototype case."""


class LapseSingular(IMCFLabError, ValueError):
    """A prototype lapse denominator is not positive."""


class FamilyTooSmall(IMCFLabError, ValueError):
    """A convergence study needs at least four members."""


class ParameterNotDecreasing(IMCFLabError, ValueError):
    """Study parameters must decrease strictly."""


class ParseError(IMCFLabError, ValueError):
    """Malformed scenario document."""


class ValidationError(IMCFLabError, ValueError):
    """Well-formed scenario that violates an invariant.

    ``field`` names the offending entry.
    """

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or field)
