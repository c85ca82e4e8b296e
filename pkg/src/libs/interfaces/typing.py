from __future__ import annotations

from typing import Tuple

# --- Type Aliases ---
# A rank or index: an arbitrary-precision nonnegative Python int.
BigIndex = int
# A point of [n], 1-based.
Point = int
# A bit string written as '0'/'1' characters; len() is its bit length.
Bits = str
# An image table, entry i-1 holding pi(i).
Images = Tuple[int, ...]
# --- End Type Aliases ---


# Validates a rank value and returns it unchanged.
def as_index(value: int, name: str = "index") -> BigIndex:
    """
    Checks that a value can serve as a BigIndex.

    Args:
        value: The candidate index.
        name: Used in the error message.

    Raises:
        TypeError: If the value is not an int.
        ValueError: If the value is negative.

    Returns:
        The value itself.
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an integer, not {type(value).__name__}")
    if value < 0:
        raise ValueError(f"{name} must be nonnegative, got {value}")
    return value


# Checks that a string is made of '0' and '1' only.
def is_bits(value: str) -> bool:
    return all(c in "01" for c in value)
