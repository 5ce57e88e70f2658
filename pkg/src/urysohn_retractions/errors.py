"""Exception hierarchy shared by every module of the package."""


class UrysohnError(Exception):
    """Base class for all errors raised by this package."""


class EmptyIntervalError(UrysohnError, ValueError):
    pass


class ShapeError(UrysohnError, ValueError):
    pass


class MetricError(UrysohnError, ValueError):
    """A matrix or distance function that should be a metric is not."""


class InvalidKatetovError(UrysohnError, ValueError):
    pass


class DuplicateLabelError(UrysohnError, ValueError):
    pass


class InvalidTripleError(UrysohnError, ValueError):
    pass


class InvalidSpecError(UrysohnError, ValueError):
    """An extension spec does not fit the triple it is applied to."""


class NotIsometricError(UrysohnError, ValueError):
    pass


class OverlapError(UrysohnError, ValueError):
    """Two structures disagree on the part they are supposed to share."""


class PreconditionError(UrysohnError, ValueError):
    """A quantitative hypothesis of a construction is violated."""


class ConvergenceError(UrysohnError, RuntimeError):
    pass


class BudgetExceededError(UrysohnError, RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ScriptError(UrysohnError, ValueError):
    def __init__(self, message, round_index):
        super().__init__(f"round {round_index}: {message}")
        self.round_index = round_index


class PipelineError(UrysohnError, RuntimeError):
    """A sub-operation of a multi-stage construction failed."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
