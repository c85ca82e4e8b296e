from typing import Optional


class ReductionError(Exception):
    """Base class for every error raised by this package."""


# Bad point, degree mismatch, non-member, singular matrix, malformed payload.
class DomainError(ReductionError, ValueError):
    pass


# An index outside its declared range.
class RangeError(ReductionError, IndexError):
    pass


class InvariantViolation(ReductionError, RuntimeError):
    """An internal guarantee did not hold (a bug or an unverified artifact)."""


class BuildFailure(ReductionError, RuntimeError):
    """A randomized construction ran out of retries."""


class HintFailure(ReductionError, RuntimeError):
    """A sample could not be explained by the hinted orbit."""


class AuditFailure(ReductionError, RuntimeError):
    """The counting audit found description bits that are not charged."""


# Malformed settings or experiment config; remembers the offending line.
class ConfigError(ReductionError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line: Optional[int] = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UsageError(ReductionError, ValueError):
    """Bad command-line usage."""
