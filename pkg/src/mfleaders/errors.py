"""Exception types shared across the package."""


class MFLeadersError(Exception):
    """Base class for all mfleaders errors."""


class DomainError(MFLeadersError, ValueError):
    """A point or parameter lies outside the unit-interval domain."""


class SignalLengthError(MFLeadersError, ValueError):
    """Signal length is not a power of two (or too short)."""


class NormalizationError(MFLeadersError, ValueError):
    """A pyramid carries the wrong normalization tag for the operation."""


class ResolutionError(MFLeadersError, ValueError):
    """Grid resolution is too coarse for the requested oscillation radius."""


class EmptyRangeError(MFLeadersError, ValueError):
    """A fit or depth range is empty or too short."""


class DegenerateLevelError(MFLeadersError, ValueError):
    """A level in the requested range has no nonzero leaders / masses."""


class WeightValidationError(MFLeadersError, ValueError):
    """Measure weights or a cascade weight law fail their constraints."""


class ProfileValidationError(MFLeadersError, ValueError):
    """A Holder-exponent profile violates its codomain or ordering constraints."""


class ExtrapolationError(MFLeadersError, ValueError):
    """A requested evaluation point falls outside the tabulated grid."""


class ConfigError(MFLeadersError, ValueError):
    """Invalid experiment configuration; message names the offending field."""


class FormatError(MFLeadersError, ValueError):
    """A file does not conform to the expected on-disk format."""
