"""Exception types shared across the package."""


class SingularityError(ValueError):
    """Desired acceleration lies on the vertical ray where extraction is undefined.

    Unreachable when ``k_p + k_v < g``.
    """


class DegenerateFrameError(ValueError):
    pass


class NonFiniteError(FloatingPointError):
    pass


class DivergenceError(RuntimeError):
    """Closed loop blew up; ``log`` holds the rows recorded before the failure."""

    def __init__(self, message, log=None):
        super().__init__(message)
        self.log = log


class IncompleteLogError(ValueError):
    pass


class ConfigError(ValueError):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass
