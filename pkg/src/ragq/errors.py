"""Exception hierarchy.

Data problems derive from :class:`DataError` (CLI exit code 2), everything
raised while a stage runs derives from :class:`RagqError` (exit code 3).
"""


class RagqError(Exception):
    pass


class DataError(RagqError, ValueError):
    pass


class SchemaError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyInputError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class SignalTooShortError(DataError):
    pass


class MetricUndefinedError(RagqError, ValueError):
    pass


class MapeUndefinedError(MetricUndefinedError):
    pass


class R2UndefinedError(MetricUndefinedError):
    pass


class CorrelationUndefinedError(MetricUndefinedError):
    pass


class NotFittedError(RagqError, RuntimeError):
    pass


class TrainingFailedError(RagqError, RuntimeError):
    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class NoFeasiblePointError(RagqError, RuntimeError):
    pass


class ConfigurationError(RagqError, ValueError):
    pass


class PipelineError(RagqError, RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class NothingToRenderError(RagqError, ValueError):
    pass
