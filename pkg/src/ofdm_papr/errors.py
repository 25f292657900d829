"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """An argument violates an operation's precondition."""


class InvalidSpecError(InvalidInputError):
    """A filter specification cannot be designed as given."""


class InvalidConfigError(InvalidInputError):
    """A simulation configuration is inconsistent."""


class UndefinedPaprError(InvalidInputError):
    """PAPR requested for a block with zero average power."""


class OutOfRangeError(InvalidInputError):
    """A readout level lies outside the range a curve covers."""


class ConvergenceError(RuntimeError):
    """Remez exchange did not converge; ``last`` holds the final iterate."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last
