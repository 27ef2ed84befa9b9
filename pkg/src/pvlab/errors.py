"""Exception hierarchy shared by all pvlab modules."""


class PvlabError(Exception):
    """Base class for every error raised by pvlab."""


class DomainError(PvlabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(PvlabError, ValueError):
    """An argument exceeds the range covered by a precomputed table."""


class PreconditionError(PvlabError, ValueError):
    """A structural precondition (coprimality, monotonicity, ...) does not hold."""


class ResolutionError(PvlabError):
    """A frequency grid is too coarse to resolve a cutoff's support."""


class SizeError(PvlabError, OverflowError):
    """An output would exceed the supported index range or memory budget."""


class ConfigError(PvlabError, ValueError):
    """An experiment configuration is malformed; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
