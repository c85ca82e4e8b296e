"""
Bit strings written as '0'/'1' characters.

Descriptions, parameter blobs and canonical invariants are all plain
strings of bits; ``len()`` is the bit length. Integers that must be read
back without a known width are written with the Elias gamma code, which
is prefix-free.
"""

from typing import List

from libs.interfaces.errors import DomainError, RangeError
from libs.interfaces.typing import Bits


# Returns the number of bits needed to write every index in [0, count).
def field_width(count: int) -> int:
    """
    Width of a fixed-size field holding values 0..count-1, i.e. ceil(log2 count).
    A count of 1 needs no bits at all.
    """
    if count < 1:
        raise DomainError(f"a field must hold at least one value, got count={count}")
    return (count - 1).bit_length()


# Writes a nonnegative integer in exactly `width` bits, most significant first.
def int_to_bits(value: int, width: int) -> Bits:
    if value < 0 or value.bit_length() > width:
        raise RangeError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def bits_to_int(bits: Bits) -> int:
    return int(bits, 2) if bits else 0


# Elias gamma code of a positive integer.
def gamma_encode(value: int) -> Bits:
    """
    Encodes value >= 1 as (L-1) zeros followed by its L-bit binary form.

    Raises:
        DomainError: If value < 1.
    """
    if value < 1:
        raise DomainError(f"gamma code is defined for positive integers, got {value}")
    binary: str = bin(value)[2:]
    return "0" * (len(binary) - 1) + binary


def gamma_length(value: int) -> int:
    return 2 * value.bit_length() - 1


class BitWriter:
    """Accumulates fields into one bit string."""

    def __init__(self) -> None:
        self._chunks: List[str] = []

    def write_bits(self, bits: Bits) -> "BitWriter":
        self._chunks.append(bits)
        return self

    def write_uint(self, value: int, width: int) -> "BitWriter":
        self._chunks.append(int_to_bits(value, width))
        return self

    # Nonnegative values are shifted by one so that zero is writable.
    def write_gamma(self, value: int) -> "BitWriter":
        self._chunks.append(gamma_encode(value + 1))
        return self

    def getvalue(self) -> Bits:
        return "".join(self._chunks)


class BitReader:
    """Reads fields back from a bit string in the order a BitWriter wrote them."""

    def __init__(self, bits: Bits):
        self.bits: Bits = bits
        self.pos: int = 0

    @property
    def remaining(self) -> int:
        return len(self.bits) - self.pos

    def at_end(self) -> bool:
        return self.pos == len(self.bits)

    def read_bits(self, count: int) -> Bits:
        if count > self.remaining:
            raise DomainError(
                f"bit string ended early\n|- wanted {count} bits at offset {self.pos}, {self.remaining} left"
            )
        chunk: Bits = self.bits[self.pos:self.pos + count]
        self.pos += count
        return chunk

    def read_uint(self, width: int) -> int:
        return bits_to_int(self.read_bits(width))

    def read_gamma(self) -> int:
        zeros: int = 0
        while self.pos + zeros < len(self.bits) and self.bits[self.pos + zeros] == "0":
            zeros += 1
        self.pos += zeros
        value: int = bits_to_int(self.read_bits(zeros + 1))
        if value < 1:
            raise DomainError(f"malformed gamma code at offset {self.pos}")
        return value - 1

    def expect_end(self) -> None:
        if not self.at_end():
            raise DomainError(f"{self.remaining} trailing bits after the last field")


# Makes a payload self-delimiting by prefixing its gamma-coded length.
def frame(payload: Bits) -> Bits:
    return gamma_encode(len(payload) + 1) + payload


def unframe(bits: Bits) -> Bits:
    """
    Inverse of frame().

    Raises:
        DomainError: If the length prefix is malformed or does not match exactly.
    """
    reader: BitReader = BitReader(bits)
    length: int = reader.read_gamma()
    payload: Bits = reader.read_bits(length)
    reader.expect_end()
    return payload
