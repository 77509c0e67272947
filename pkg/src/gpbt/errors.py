"""Exception hierarchy shared across the package."""


class GPBTError(Exception):
    """Base class for all package errors."""

    category = "error"
    exit_code = 1


class DomainError(GPBTError, ValueError):
    category = "domain"
    exit_code = 2


class NumericError(GPBTError, ArithmeticError):
    category = "numeric"
    exit_code = 3


class SequencingError(GPBTError):
    """A report arrived out of step order for its agent."""

    category = "sequencing"
    exit_code = 4


class PreconditionError(GPBTError):
    category = "precondition"
    exit_code = 5


class ConfigError(GPBTError, ValueError):
    """Invalid experiment or scheduler configuration.

    ``problems`` holds ``(field_path, message)`` pairs so that every failure
    in a config file can be reported at once.
    """

    category = "config"
    exit_code = 6

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [("", problems)]
        self.problems = list(problems)
        lines = [f"{path}: {msg}" if path else msg for path, msg in self.problems]
        super().__init__("; ".join(lines))


class DeserializationError(GPBTError, ValueError):
    category = "deserialization"
    exit_code = 7


class ComparisonError(GPBTError):
    category = "comparison"
    exit_code = 8


class OutputError(GPBTError, OSError):
    category = "io"
    exit_code = 9
