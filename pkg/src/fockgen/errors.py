"""Exception types raised across the package."""


class FockgenError(Exception):
    """Base class for numerical and validation failures."""


class NotHermitian(FockgenError, ValueError):
    pass


class NegativeSpectrum(FockgenError, ValueError):
    pass


class DimensionMismatch(FockgenError, ValueError):
    pass


class TruncationTooSmall(FockgenError, ValueError):
    pass


class IndexOutOfRange(FockgenError, IndexError):
    pass


class UnsupportedAtomCount(FockgenError, ValueError):
    pass


class StepSizeTooLarge(FockgenError, RuntimeError):
    """Lindblad trace drift exceeded tolerance; the caller should refine ``dt``."""


class NoImprovement(FockgenError, RuntimeError):
    """Every branch optimum fell below the undisturbed t = 0 baseline."""


class ZeroProbabilityOutcome(FockgenError, ValueError):
    pass


class UnknownTag(FockgenError, KeyError):
    def __str__(self):
        # KeyError would repr-quote the message
        return str(self.args[0]) if self.args else ""


class ConfigError(FockgenError, ValueError):
    pass


class GridTooCoarse(UserWarning):
    """Wigner grid integral deviates noticeably from one."""
