from .typing import BigIndex, Point, Bits, Images, as_index, is_bits
from .errors import (
    ReductionError, DomainError, RangeError, InvariantViolation, BuildFailure,
    HintFailure, AuditFailure, ConfigError, UsageError,
)
