"""
Encodings of samplable, nearly flat distributions by random linear hashing.

A sampler is a BitProgram: a map from {0,1}^ell to outcome strings. For a
max-entropy bound s, a FlatScheme holds 3*ceil(s) random affine hashes
h(sigma) = U sigma + v over F_2 with m = ell - ceil(s) - 2 output bits. A
hash "works for" an outcome y when its zero set h^-1(0^m) is nonempty, has
at most 2^(ceil(s)+3) points and contains some sigma with program(sigma) = y.
The outcome is then encoded as k = 2^(ceil(s)+3) * i + j, where i names the
hash and j indexes that sigma inside the zero set.
"""

from dataclasses import dataclass, field
from math import ceil, log2
from typing import Any, Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from libs.fields.fq_linalg import MatrixFq, rref_with_transform
from libs.interfaces.errors import BuildFailure, DomainError, InvariantViolation, RangeError
from libs.interfaces.typing import BigIndex, Bits, as_index
from libs.utils.bits import BitReader, BitWriter
from libs.utils.pylog import Logger

logger = Logger(__name__)

# Extra input bits read by orbit_program beyond ceil(log2 |H|).
FOLD_BITS: int = 6


# Bits of value as a uint8 vector of length ell, most significant first.
def sigma_from_int(value: int, ell: int) -> np.ndarray:
    return np.array([(value >> (ell - 1 - i)) & 1 for i in range(ell)], dtype=np.uint8)


def sigma_to_int(sigma: np.ndarray) -> int:
    value: int = 0
    for bit in sigma:
        value = (value << 1) | int(bit)
    return value


def all_sigmas(ell: int) -> np.ndarray:
    """Every vector of {0,1}^ell, one per row, in counting order."""
    values: np.ndarray = np.arange(2 ** ell, dtype=np.int64)
    shifts: np.ndarray = np.arange(ell - 1, -1, -1, dtype=np.int64)
    return ((values[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


class BitProgram:
    """A sampler: ell random bits in, one outcome string out."""

    def __init__(self, ell: int, fn: Callable[[np.ndarray], Bits], name: str = "program"):
        if ell < 1:
            raise DomainError(f"a sampler needs at least one input bit, got ell={ell}")
        self.ell: int = ell
        self.fn: Callable[[np.ndarray], Bits] = fn
        self.name: str = name

    def __call__(self, sigma: np.ndarray) -> Bits:
        return self.fn(sigma)

    def run_int(self, value: int) -> Bits:
        return self.fn(sigma_from_int(value, self.ell))

    def sample(self, rng: np.random.Generator) -> Bits:
        return self.fn(rng.integers(0, 2, size=self.ell).astype(np.uint8))

    # Counts how many inputs produce each outcome.
    def outcome_counts(self) -> Dict[Bits, int]:
        counts: Dict[Bits, int] = {}
        for sigma in all_sigmas(self.ell):
            y: Bits = self.fn(sigma)
            counts[y] = counts.get(y, 0) + 1
        return counts


def max_entropy(program: BitProgram) -> float:
    """The least s with every outcome probability at least 2^-s, by exhausting the inputs."""
    counts: Dict[Bits, int] = program.outcome_counts()
    return program.ell - log2(min(counts.values()))


class LinearHash:
    """
    sigma -> U sigma + v over F_2, with U an m x ell 0/1 matrix.
    The zero set is solved once and kept.
    """

    def __init__(self, u: np.ndarray, v: np.ndarray):
        u = np.asarray(u, dtype=np.uint8)
        v = np.asarray(v, dtype=np.uint8).reshape(-1)
        if u.ndim != 2 or u.shape[0] != v.shape[0]:
            raise DomainError(f"hash shapes do not match: U {u.shape}, v {v.shape}")
        if (u > 1).any() or (v > 1).any():
            raise DomainError("hash entries must be bits")
        self.u: np.ndarray = u
        self.v: np.ndarray = v
        self._solution: Optional[Tuple[Optional[np.ndarray], np.ndarray]] = None

    @property
    def m(self) -> int:
        return int(self.u.shape[0])

    @property
    def ell(self) -> int:
        return int(self.u.shape[1])

    @classmethod
    def random(cls, m: int, ell: int, rng: np.random.Generator) -> "LinearHash":
        return cls(rng.integers(0, 2, size=(m, ell)), rng.integers(0, 2, size=m))

    def __call__(self, sigma: np.ndarray) -> np.ndarray:
        return ((self.u.astype(np.int64) @ np.asarray(sigma, dtype=np.int64)) + self.v) % 2

    # Particular solution of U sigma = v (None when inconsistent) and a kernel basis.
    def _solve(self) -> Tuple[Optional[np.ndarray], np.ndarray]:
        if self._solution is None:
            r, t, pivots = rref_with_transform(MatrixFq(self.u.astype(np.int64), 2))
            tv: np.ndarray = (t.data @ self.v.astype(np.int64)) % 2 if self.m else np.zeros(0, dtype=np.int64)
            rank: int = len(pivots)
            particular: Optional[np.ndarray] = None
            if not tv[rank:].any():
                particular = np.zeros(self.ell, dtype=np.uint8)
                for p, col in enumerate(pivots):
                    particular[col] = tv[p]
            taken: Set[int] = set(pivots)
            basis: List[np.ndarray] = []
            for f in (c for c in range(self.ell) if c not in taken):
                vec: np.ndarray = np.zeros(self.ell, dtype=np.uint8)
                vec[f] = 1
                for p, col in enumerate(pivots):
                    vec[col] = r.data[p, f] % 2
                basis.append(vec)
            basis_array: np.ndarray = np.array(basis, dtype=np.uint8).reshape(len(basis), self.ell)
            self._solution = (particular, basis_array)
        return self._solution

    @property
    def preimage_size(self) -> int:
        """|h^-1(0^m)|: 0 when U sigma = v has no solution, else 2^(ell - rank U)."""
        particular, basis = self._solve()
        return 0 if particular is None else 2 ** basis.shape[0]

    def preimage(self) -> np.ndarray:
        """Every sigma with h(sigma) = 0^m, in kernel_unrank order."""
        particular, basis = self._solve()
        if particular is None:
            return np.zeros((0, self.ell), dtype=np.uint8)
        dim: int = basis.shape[0]
        coeffs: np.ndarray = ((np.arange(2 ** dim)[:, None] >> np.arange(dim)[None, :]) & 1).astype(np.int64)
        return ((coeffs @ basis.astype(np.int64) + particular) % 2).astype(np.uint8)

    def to_bits(self) -> Bits:
        return "".join(str(int(b)) for b in self.u.reshape(-1)) + "".join(str(int(b)) for b in self.v)

    def format(self) -> List[str]:
        lines: List[str] = ["".join(str(int(b)) for b in row) for row in self.u]
        lines.append("".join(str(int(b)) for b in self.v))
        return lines


def kernel_unrank(h: LinearHash, j: BigIndex) -> np.ndarray:
    """
    The j-th point of h^-1(0^m): the particular solution plus the kernel
    basis vectors selected by the bits of j (bit 0 picks the first basis
    vector, which belongs to the lowest free column).

    Raises:
        DomainError: If the zero set is empty.
        RangeError: If j >= |h^-1(0^m)|.
    """
    as_index(j, "kernel index")
    particular, basis = h._solve()
    if particular is None:
        raise DomainError("the hash has no zero: U sigma = v is inconsistent")
    size: int = 2 ** basis.shape[0]
    if j >= size:
        raise RangeError(f"kernel index {j} is out of range (preimage size {size})")
    sigma: np.ndarray = particular.astype(np.int64)
    for i in range(basis.shape[0]):
        if (j >> i) & 1:
            sigma = sigma + basis[i]
    return (sigma % 2).astype(np.uint8)


def works_for(h: LinearHash, program: BitProgram, y: Bits, bound: int) -> bool:
    size: int = h.preimage_size
    if size == 0 or size > bound:
        return False
    return any(program(sigma) == y for sigma in h.preimage())


def scheme_shape(ell: int, s: float) -> Tuple[int, int, int, int]:
    """
    Returns (ceil_s, m, count, bound) for an input length and entropy bound.
    m is clamped at 0 and count at 1 for degenerate inputs.
    """
    ceil_s: int = max(0, ceil(s))
    m: int = max(0, ell - ceil_s - 2)
    count: int = max(1, 3 * ceil_s)
    bound: int = 2 ** (ceil_s + 3)
    return ceil_s, m, count, bound


# Fraction of random hashes that work for y.
def works_for_rate(program: BitProgram, s: float, y: Bits, trials: int, rng: np.random.Generator) -> float:
    _, m, _, bound = scheme_shape(program.ell, s)
    hits: int = sum(works_for(LinearHash.random(m, program.ell, rng), program, y, bound) for _ in range(trials))
    return hits / trials


@dataclass
class FlatScheme:
    """A verified list of hashes plus the sampler it encodes."""
    ell: int
    m: int
    ceil_s: int
    hashes: Tuple[LinearHash, ...]
    program: Optional[BitProgram] = None
    verification: str = "unverified"
    _tables: Dict[int, Dict[Bits, int]] = field(default_factory=dict, repr=False)

    @property
    def count(self) -> int:
        return len(self.hashes)

    @property
    def bound(self) -> int:
        return 2 ** (self.ceil_s + 3)

    @property
    def index_range(self) -> int:
        return self.count * self.bound

    @property
    def encoded_length(self) -> int:
        return (self.index_range - 1).bit_length()

    # Outcome -> first zero-set index producing it, for hash i (empty when the hash cannot work).
    def table(self, i: int) -> Dict[Bits, int]:
        if i not in self._tables:
            if self.program is None:
                raise DomainError("this scheme carries no sampler; attach one before encoding")
            h: LinearHash = self.hashes[i]
            found: Dict[Bits, int] = {}
            if 0 < h.preimage_size <= self.bound:
                for j, sigma in enumerate(h.preimage()):
                    found.setdefault(self.program(sigma), j)
            self._tables[i] = found
        return self._tables[i]

    def covers(self, targets: Set[Bits]) -> Set[Bits]:
        """Returns the targets no hash works for."""
        missing: Set[Bits] = set(targets)
        for i in range(self.count):
            if not missing:
                break
            missing -= self.table(i).keys()
        return missing

    def serialize(self) -> str:
        lines: List[str] = [f"{self.ell} {self.m} {self.ceil_s} {self.count}"]
        for h in self.hashes:
            lines.extend(h.format())
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, program: Optional[BitProgram] = None) -> "FlatScheme":
        """
        Reads the scheme format: an "ell m s count" header, then per hash m
        rows of U and one row holding v (empty when m = 0).

        Raises:
            DomainError: On a malformed header or body.
        """
        lines: List[str] = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        try:
            ell, m, ceil_s, count = (int(tok) for tok in lines[0].split())
        except (ValueError, IndexError):
            raise DomainError(f"scheme header must be 'ell m s count'\n|- {lines[:1]!r}")
        if len(lines) != 1 + count * (m + 1):
            raise DomainError(f"scheme body has {len(lines) - 1} lines, expected {count * (m + 1)}")
        hashes: List[LinearHash] = []
        for i in range(count):
            block: List[str] = lines[1 + i * (m + 1): 1 + (i + 1) * (m + 1)]
            hashes.append(_hash_from_rows(block[:m], block[m], ell))
        return cls(ell, m, ceil_s, tuple(hashes), program)

    def to_bits(self) -> Bits:
        writer: BitWriter = BitWriter()
        writer.write_gamma(self.ell).write_gamma(self.m).write_gamma(self.ceil_s).write_gamma(self.count)
        for h in self.hashes:
            writer.write_bits(h.to_bits())
        return writer.getvalue()

    @classmethod
    def read_bits(cls, reader: BitReader, program: Optional[BitProgram] = None) -> "FlatScheme":
        ell, m, ceil_s, count = (reader.read_gamma() for _ in range(4))
        hashes: List[LinearHash] = []
        for _ in range(count):
            u: np.ndarray = np.array([int(b) for b in reader.read_bits(m * ell)], dtype=np.uint8).reshape(m, ell)
            v: np.ndarray = np.array([int(b) for b in reader.read_bits(m)], dtype=np.uint8)
            hashes.append(LinearHash(u, v))
        return cls(ell, m, ceil_s, tuple(hashes), program)


def _hash_from_rows(rows: Sequence[str], v_line: str, ell: int) -> LinearHash:
    for line in list(rows) + [v_line]:
        if any(c not in "01" for c in line):
            raise DomainError(f"hash rows must be bit strings\n|- {line!r}")
    for line in rows:
        if len(line) != ell:
            raise DomainError(f"hash row has {len(line)} bits, expected {ell}")
    if len(v_line) != len(rows):
        raise DomainError(f"v has {len(v_line)} bits, expected {len(rows)}")
    u: np.ndarray = np.array([[int(c) for c in line] for line in rows], dtype=np.uint8).reshape(len(rows), ell)
    v: np.ndarray = np.array([int(c) for c in v_line], dtype=np.uint8)
    return LinearHash(u, v)


# Collects the outcomes a scheme must cover: all of them, or a sample for long inputs.
def _target_outcomes(program: BitProgram, exhaustive_ell: int, sample_checks: int,
                     rng: np.random.Generator) -> Tuple[Set[Bits], str]:
    if program.ell <= exhaustive_ell:
        return set(program.outcome_counts()), "exhaustive"
    return {program.sample(rng) for _ in range(sample_checks)}, "sampled"


def build_scheme(program: BitProgram, s: float, rng: np.random.Generator, retry_budget: int = 64,
                 exhaustive_ell: int = 20, sample_checks: int = 4096) -> FlatScheme:
    """
    Draws hash lists until every outcome of the sampler has a working hash.

    Args:
        program: The sampler.
        s: A max-entropy bound for the sampler's distribution.
        rng: Source of the hash matrices.
        retry_budget: Number of fresh hash lists to try.
        exhaustive_ell: Inputs up to this length are checked exhaustively;
            longer ones against sample_checks sampled outcomes.
        sample_checks: Number of sampled outcomes for long inputs.

    Raises:
        BuildFailure: If no hash list covers every outcome within the budget,
            which usually means s was too small.
    """
    ceil_s, m, count, _ = scheme_shape(program.ell, s)
    targets, mode = _target_outcomes(program, exhaustive_ell, sample_checks, rng)

    for attempt in range(1, retry_budget + 1):
        hashes: Tuple[LinearHash, ...] = tuple(LinearHash.random(m, program.ell, rng) for _ in range(count))
        scheme: FlatScheme = FlatScheme(program.ell, m, ceil_s, hashes, program)
        missing: Set[Bits] = scheme.covers(targets)
        if not missing:
            scheme.verification = mode
            logger.info(f"Flat scheme for '{program.name}' built on attempt {attempt} ({mode} check, {len(targets)} outcomes).")
            return scheme
        logger.info(f"Attempt {attempt}: {len(missing)} outcomes have no working hash; retrying.")

    raise BuildFailure(
        f"no hash list covered the sampler '{program.name}' within {retry_budget} attempts"
        f"\n|- ell={program.ell}, s={s}; the entropy bound is probably too small"
    )


def encode(scheme: FlatScheme, y: Bits) -> BigIndex:
    """
    Raises:
        InvariantViolation: If no hash works for y.
    """
    for i in range(scheme.count):
        j: Optional[int] = scheme.table(i).get(y)
        if j is not None:
            return scheme.bound * i + j
    raise InvariantViolation(f"no hash of the scheme works for outcome {y!r}; the scheme was not verified for it")


def decode(scheme: FlatScheme, k: BigIndex) -> Bits:
    """
    Runs the sampler on the zero-set point named by k. Every k in range
    decodes: j wraps modulo the zero-set size, and a hash without zeros
    falls back to the all-zero input.

    Raises:
        RangeError: If k >= count * bound.
    """
    as_index(k, "scheme index")
    if k >= scheme.index_range:
        raise RangeError(f"scheme index {k} is out of range ({scheme.index_range})")
    if scheme.program is None:
        raise DomainError("this scheme carries no sampler; attach one before decoding")
    i, j = divmod(k, scheme.bound)
    h: LinearHash = scheme.hashes[i]
    size: int = h.preimage_size
    sigma: np.ndarray = np.zeros(scheme.ell, dtype=np.uint8) if size == 0 else kernel_unrank(h, j % size)
    return scheme.program(sigma)


def orbit_program(kind: Any, w: Any) -> BitProgram:
    """
    The sampler of random isomorphic copies: read ceil(log2 |H|) +
    FOLD_BITS bits as k, decode k mod |H| to a group element and output the
    canonical form of its image of w.

    Every element of H is hit floor(2^ell / |H|) or one more times, and
    2^ell / |H| >= 2^FOLD_BITS, so each outcome has probability within a
    factor 1 + 2^-FOLD_BITS of 1 / |orbit|. max_entropy of this program is
    therefore at most log2 |orbit| - log2(1 - 2^-FOLD_BITS).

    Args:
        kind: An object kind from libs.iso.framework.
        w: A universe element of that kind.
    """
    order: int = kind.group_order()
    ell: int = (order - 1).bit_length() + FOLD_BITS

    def run(sigma: np.ndarray) -> Bits:
        k: int = sigma_to_int(sigma) % order
        return kind.invariant(kind.act(kind.unrank_element(k), w))

    return BitProgram(ell, run, name=f"{kind.name}-orbit")
