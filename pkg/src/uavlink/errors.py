"""Exception types shared across the package."""


class UavlinkError(Exception):
    """Base class for all uavlink errors."""


class SchemeError(UavlinkError, ValueError):
    """Operation applied to the wrong modulation scheme or order."""


class InfeasibleRateError(UavlinkError):
    """A modulation order cannot meet the BEP threshold even with perfect CSI."""


class InfeasibleCsiError(UavlinkError):
    """No finite transmit power meets the BEP threshold at this ACF value."""


class InfeasibleTargetError(UavlinkError, ValueError):
    """ACF inversion target lies outside the attainable range."""


class NumericOverflowError(UavlinkError, ArithmeticError):
    """A closed-form evaluation produced a non-finite intermediate."""


class DivergenceError(UavlinkError, ArithmeticError):
    """An iterative root finder produced a non-finite or invalid update."""


class MonotonicityError(UavlinkError):
    """A quantity required to be monotone for root bracketing is not."""


class ScheduleError(UavlinkError):
    """A rate/power schedule is internally inconsistent."""


class ConfigError(UavlinkError, ValueError):
    """A run configuration file is missing or malformed."""
