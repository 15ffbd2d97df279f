"""Exception hierarchy shared by every module of the package."""


class OEBError(Exception):
    """Base class for all errors raised by :mod:`oeb`."""


class ConfigError(OEBError):
    """A run configuration could not be parsed or validated."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


# schedules

class FormulaOutOfRange(OEBError):
    def __init__(self, schedule_id, index, value):
        super().__init__(
            f"schedule {schedule_id!r} produced {value!r} at n={index}, outside [0, 1]"
        )
        self.schedule_id = schedule_id
        self.index = index
        self.value = value


class UnknownSchedule(OEBError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown schedule"


class DegenerateSchedule(OEBError):
    """All evaluated terms are zero; ``report`` carries exponent 0 and the flag."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConditionUnsatisfiable(OEBError):
    def __init__(self, index, value, threshold):
        super().__init__(
            f"b_{index} = {value!r} exceeds {threshold!r}; no a_n in [0, 1] satisfies the comparison condition"
        )
        self.index = index
        self.value = value
        self.threshold = threshold


# mappings

class OutOfDomain(OEBError):
    pass


class AsymmetricDomain(OEBError):
    pass


class UnknownMap(OEBError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown map"


# bounds

class BadAlpha(OEBError):
    pass


class LowerUndefined(OEBError):
    """A lower-bound factor is not positive, so the OLEB is not defined."""

    def __init__(self, index, factor, which=None):
        where = f" ({which} factor)" if which else ""
        super().__init__(f"lower-bound factor at k={index}{where} is {factor!r} <= 0")
        self.index = index
        self.factor = factor
        self.which = which


class NonpositiveFactor(OEBError):
    def __init__(self, index, factor):
        super().__init__(f"factor at k={index} is {factor!r} <= 0; logarithm undefined")
        self.index = index
        self.factor = factor


class PreconditionViolated(OEBError):
    pass


# analysis

class HypothesisUnavailable(OEBError):
    """No admissible upper rate constant; ``report`` holds sigma without the sandwich."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MismatchedRuns(OEBError):
    pass


# iteration

class StartAtFixedPoint(UserWarning):
    """Raised as a warning: x0 equals x*, so every error is 0."""
