"""Exception hierarchy shared by the core modules and the service."""


class DriftwatchError(Exception):
    """Base class for all driftwatch errors."""


class EmptyWindow(DriftwatchError):
    pass


class EmptyInput(DriftwatchError, ValueError):
    pass


class NonFiniteInput(DriftwatchError, ValueError):
    pass


class InvalidK(DriftwatchError, ValueError):
    pass


class EmptySample(DriftwatchError, ValueError):
    pass


class BadEdges(DriftwatchError, ValueError):
    pass


class EdgeMismatch(DriftwatchError, ValueError):
    pass


class BadEps(DriftwatchError, ValueError):
    pass


class BadBucketWidth(DriftwatchError, ValueError):
    pass


class EmptyTraining(DriftwatchError, ValueError):
    pass


class UnknownFeature(DriftwatchError, KeyError):
    pass


class FormatVersionMismatch(DriftwatchError):
    pass


class CorruptFile(DriftwatchError):
    pass


class InsufficientScores(DriftwatchError, ValueError):
    pass


class BadParams(DriftwatchError, ValueError):
    pass


class ConfigError(DriftwatchError, ValueError):
    pass
