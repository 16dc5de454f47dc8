"""Exception types shared across the package."""


class ScalesimError(Exception):
    """Base class for every error raised by this package."""


# --- trace ingestion ---


class MalformedRowError(ScalesimError):
    """A trace row could not be parsed or violates a field bound."""


class EmptyTraceError(ScalesimError):
    """The trace source contained no data rows."""


class UnknownInstanceTypeError(ScalesimError):
    """An instance type in the trace has no vCPU entry in the catalog."""


class GridGapError(ScalesimError):
    """A time step is missing and no fill policy allows repairing it."""


class SplitOutOfRangeError(ScalesimError):
    """Split timestamp would leave an empty train or predict part."""


# --- forecasting ---


class SeriesTooShortError(ScalesimError):
    """Not enough observations for the requested operation."""


class SeedMismatchError(ScalesimError):
    """Integration seeds do not match the differencing degree."""


class NonConvergenceError(ScalesimError):
    """The coefficient optimizer exhausted its iteration budget."""


class DegenerateSeriesError(ScalesimError):
    """Zero variance after differencing; AR/MA terms are unidentifiable."""


class AllFitsFailedError(ScalesimError):
    """No candidate order produced a usable fit."""


class EmptyHistoryError(ScalesimError):
    """Forecasting requires at least one observation of history."""


# --- policies and simulation ---


class EmptyWindowError(ScalesimError):
    """The utilization window handed to a policy is empty."""


class InvalidForecastError(ScalesimError):
    """Predicted demand is not a finite number."""


class ConfigMismatchError(ScalesimError):
    """Simulation inputs are inconsistent with the chosen policy."""


# --- metrics ---


class LengthMismatchError(ScalesimError):
    """Actual and predicted series have different lengths."""


class ZeroVarianceError(ScalesimError):
    """Actual values are constant; the statistic is undefined."""


class AllPointsExcludedError(ScalesimError):
    """Every point was excluded (all actual values are zero)."""


class ZeroMeanError(ScalesimError):
    """Mean of the selected field is zero."""


class TooFewRecordsError(ScalesimError):
    """At least two records are required."""


class TooFewObservationsError(ScalesimError):
    """Effective sample too small for the information criterion."""
