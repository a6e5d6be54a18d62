"""Exception hierarchy shared across the package."""


class LocPrivError(Exception):
    """Base class for all locpriv errors."""


class CellOutOfGrid(LocPrivError):
    """A cell index falls outside the owning grid."""


class EmptyHistory(LocPrivError):
    """An operation needs query history but the model holds zero queries."""


class AllZeroPriors(LocPrivError):
    """Every cell of a location set has zero query count; the caller decides the fallback."""


class KTooLarge(LocPrivError):
    """Requested anonymity level exceeds the number of grid cells."""


class PoolTooLarge(LocPrivError):
    """The dummy pool would not fit in the grid."""


class InstanceTooLarge(LocPrivError):
    """Brute-force path enumeration refuses instances above its state-count guard."""


class LengthMismatch(LocPrivError):
    """Estimated and true paths differ in length."""


class HeaderTooShort(LocPrivError):
    """A PLT file ended before its six header lines."""


class FileUnreadable(LocPrivError):
    """A required input file could not be opened or read."""


class WriteFailed(LocPrivError):
    """An output file could not be written."""


class ConfigError(LocPrivError):
    """An experiment configuration value is missing or invalid."""
