"""Exception types shared across the package."""


class LyapboundError(Exception):
    """Base class for all library errors."""


class NonPositiveEntry(LyapboundError):
    """A matrix entry is zero or negative."""


class SingularMatrix(LyapboundError):
    """A matrix has zero determinant at working precision."""


class BadProbabilityVector(LyapboundError):
    """Probabilities are malformed: wrong length, nonpositive, or sum far from 1."""


class BudgetExceeded(LyapboundError):
    """The requested word enumeration would exceed the configured cap."""


class OracleTooLarge(LyapboundError):
    """Composition-sum oracle requested beyond its supported order."""


class DegenerateDenominator(LyapboundError):
    """The approximant denominator is numerically indistinguishable from zero."""


class RatioNotContracting(LyapboundError):
    """Geometric tail bound requested at an index where the term ratio is not below 1."""


class ConfigError(LyapboundError):
    """Job file or command-line configuration is invalid."""


class PrecisionUnstable(LyapboundError):
    """Doubling the working precision changed a requested output digit."""
