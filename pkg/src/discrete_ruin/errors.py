"""Exception hierarchy shared by the library and the command-line front end."""


class RuinError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RuinError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class UnsupportedError(RuinError):
    """The operation is not defined for the given claim distribution."""


class DivergenceError(DomainError):
    """An integral or transform diverges at the requested argument."""


class NoAdjustmentCoefficientError(UnsupportedError):
    """No positive adjustment coefficient exists for the model and contract."""


class ConfigError(RuinError):
    """Invalid configuration; ``problems`` lists field-addressed messages."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
