"""
Isomorphism problems as a group H acting on a universe of objects.

Each Kind bundles the acting group (S_n or GL_n(F_q)), the action on its
universe elements and a complete invariant: a bit string that depends
only on the abstract object. Four kinds are provided:

    graph          S_n relabels the vertices of a simple graph
    code           S_n permutes the coordinates of a linear code over F_q
    conjugacy      S_n conjugates a permutation group given by generators
    matrix-space   GL_n(F_q) conjugates a space of n x n matrices

Group products follow perm_core: compose(g, h) applies g first, so
act(compose(g, h), w) == act(h, act(g, w)).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from libs.fields import fq_linalg
from libs.fields.fq_linalg import MatrixFq
from libs.groups.coset_codec import normal_form
from libs.groups.group_engine import PermGroup
from libs.groups.perm_core import Permutation, compose, inverse, lehmer_rank, lehmer_unrank
from libs.interfaces.errors import DomainError, ReductionError
from libs.interfaces.typing import BigIndex, Bits
from libs.utils.bits import BitReader, BitWriter, field_width
from libs.utils.pylog import Logger

logger = Logger(__name__)

GroupElement = Any
UniverseElement = Any


class Graph:
    """A simple undirected graph on vertices 1..n, held as a 0/1 adjacency matrix."""
    __slots__ = ("adjacency",)

    def __init__(self, adjacency):
        a: np.ndarray = np.array(adjacency, dtype=np.uint8)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"adjacency matrix must be square, got shape {a.shape}")
        if (a > 1).any() or (a != a.T).any() or np.diagonal(a).any():
            raise DomainError("adjacency matrix must be 0/1, symmetric, with a zero diagonal")
        a.setflags(write=False)
        self.adjacency: np.ndarray = a

    @property
    def n(self) -> int:
        return int(self.adjacency.shape[0])

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Tuple[int, int]]) -> "Graph":
        a: np.ndarray = np.zeros((n, n), dtype=np.uint8)
        for i, j in edges:
            if i == j or not (1 <= i <= n and 1 <= j <= n):
                raise DomainError(f"bad edge ({i}, {j}) on {n} vertices")
            a[i - 1, j - 1] = a[j - 1, i - 1] = 1
        return cls(a)

    def edges(self) -> List[Tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self.adjacency))
        return [(int(i) + 1, int(j) + 1) for i, j in zip(rows, cols)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and bool(np.array_equal(self.adjacency, other.adjacency))

    def __hash__(self) -> int:
        return hash(self.adjacency.tobytes())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"


# Writes a 0/1 array as '0'/'1' characters, row-major.
def _bits_of(array: np.ndarray) -> Bits:
    return (np.asarray(array, dtype=np.uint8).reshape(-1) + 48).tobytes().decode("ascii")


def _entries_to_bits(entries: np.ndarray, width: int) -> Bits:
    return "".join(format(int(v), f"0{width}b") for v in entries.reshape(-1)) if width else ""


def _bits_to_entries(bits: Bits, count: int, width: int, q: int) -> List[int]:
    if len(bits) != count * width:
        raise DomainError(f"expected {count * width} bits of entries, got {len(bits)}")
    values: List[int] = [int(bits[i * width:(i + 1) * width], 2) for i in range(count)]
    if any(v >= q for v in values):
        raise DomainError(f"entry out of range for F_{q}")
    return values


class Kind(ABC):
    """An acting group together with its universe, action and complete invariant."""
    name: str = ""
    tag: int = -1

    def __init__(self) -> None:
        self._perm_group: Optional[PermGroup] = None

    # --- identity of the kind ---

    @abstractmethod
    def params(self) -> Tuple[int, ...]:
        """The integers that fix the universe, e.g. (n,) for graphs."""

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Kind) and (self.tag, self.params()) == (other.tag, other.params())

    def __hash__(self) -> int:
        return hash((self.tag, self.params()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}{self.params()}"

    # --- the acting group ---

    @abstractmethod
    def group_order(self) -> BigIndex: ...

    @abstractmethod
    def identity(self) -> GroupElement: ...

    @abstractmethod
    def compose(self, g: GroupElement, h: GroupElement) -> GroupElement: ...

    @abstractmethod
    def inverse(self, g: GroupElement) -> GroupElement: ...

    @abstractmethod
    def random_element(self, rng: np.random.Generator) -> GroupElement: ...

    @abstractmethod
    def unrank_element(self, k: BigIndex) -> GroupElement: ...

    @abstractmethod
    def rank_element(self, g: GroupElement) -> BigIndex: ...

    @abstractmethod
    def perm_degree(self) -> int:
        """Degree of the faithful permutation representation used for subgroup work."""

    @abstractmethod
    def to_permutation(self, g: GroupElement) -> Permutation: ...

    @abstractmethod
    def from_permutation(self, p: Permutation) -> GroupElement: ...

    @abstractmethod
    def _perm_generators(self) -> List[Permutation]: ...

    def group_as_perm(self) -> PermGroup:
        """H as a permutation group of degree perm_degree()."""
        if self._perm_group is None:
            self._perm_group = PermGroup(self.perm_degree(), self._perm_generators())
        return self._perm_group

    def group_elements(self, limit: Optional[int] = None) -> List[GroupElement]:
        """
        Every element of H in index order.

        Raises:
            DomainError: If |H| exceeds limit.
        """
        order: BigIndex = self.group_order()
        if limit is not None and order > limit:
            raise DomainError(f"|H| = {order} exceeds the enumeration limit {limit}")
        return [self.unrank_element(k) for k in range(order)]

    # --- the universe ---

    @abstractmethod
    def validate(self, w: UniverseElement) -> None:
        """Raises DomainError unless w is a well-formed element of this universe."""

    @abstractmethod
    def act(self, h: GroupElement, w: UniverseElement) -> UniverseElement: ...

    @abstractmethod
    def invariant(self, w: UniverseElement) -> Bits: ...

    @abstractmethod
    def from_invariant(self, bits: Bits) -> UniverseElement:
        """A representative of the object whose invariant is bits."""

    @abstractmethod
    def invariant_length(self) -> int: ...


class SymmetricKind(Kind):
    """Kinds acted on by S_n."""

    def __init__(self, n: int):
        super().__init__()
        if n < 1:
            raise DomainError(f"degree must be at least 1, got {n}")
        self.n: int = n
        self._symmetric: PermGroup = PermGroup.symmetric(n)

    def group_order(self) -> BigIndex:
        return factorial(self.n)

    def identity(self) -> Permutation:
        return Permutation.identity(self.n)

    def compose(self, g: Permutation, h: Permutation) -> Permutation:
        return compose(g, h)

    def inverse(self, g: Permutation) -> Permutation:
        return inverse(g)

    def random_element(self, rng: np.random.Generator) -> Permutation:
        return self._symmetric.uniform_element(rng)

    def unrank_element(self, k: BigIndex) -> Permutation:
        return lehmer_unrank(k, self.n)

    def rank_element(self, g: Permutation) -> BigIndex:
        return lehmer_rank(g)

    def perm_degree(self) -> int:
        return self.n

    def to_permutation(self, g: Permutation) -> Permutation:
        return g

    def from_permutation(self, p: Permutation) -> Permutation:
        return p

    def _perm_generators(self) -> List[Permutation]:
        return list(self._symmetric.generators)

    def _check_degree(self, h: Permutation) -> None:
        if h.degree != self.n:
            raise DomainError(f"permutation of degree {h.degree} acting on a degree-{self.n} universe")

    # 0-based source index for every target position under h.
    def _pullback(self, h: Permutation) -> np.ndarray:
        return np.array(inverse(h).images, dtype=np.int64) - 1


class GraphKind(SymmetricKind):
    """Graphs on n vertices; the invariant is the n*n adjacency matrix, row-major."""
    name = "graph"
    tag = 0

    def params(self) -> Tuple[int, ...]:
        return (self.n,)

    def validate(self, w: Graph) -> None:
        if not isinstance(w, Graph):
            raise DomainError(f"expected a Graph, got {type(w).__name__}")
        if w.n != self.n:
            raise DomainError(f"graph has {w.n} vertices, the universe has {self.n}")

    def act(self, h: Permutation, w: Graph) -> Graph:
        self._check_degree(h)
        src: np.ndarray = self._pullback(h)
        return Graph(w.adjacency[np.ix_(src, src)])

    def invariant(self, w: Graph) -> Bits:
        return _bits_of(w.adjacency)

    def from_invariant(self, bits: Bits) -> Graph:
        if len(bits) != self.n * self.n or any(c not in "01" for c in bits):
            raise DomainError(f"a graph invariant has {self.n * self.n} bits, got {len(bits)}")
        return Graph(np.frombuffer(bits.encode("ascii"), dtype=np.uint8).reshape(self.n, self.n) - 48)

    def invariant_length(self) -> int:
        return self.n * self.n


class CodeKind(SymmetricKind):
    """
    d-dimensional codes in F_q^n given by a d x n generator matrix; the
    coordinates are permuted. The invariant is the RREF, ceil(log2 q) bits
    per entry.
    """
    name = "code"
    tag = 1

    def __init__(self, n: int, d: int, q: int):
        super().__init__(n)
        if not fq_linalg.is_prime(q):
            raise DomainError(f"q = {q} is not prime")
        if not 1 <= d <= n:
            raise DomainError(f"code dimension {d} must lie in [1, {n}]")
        self.d: int = d
        self.q: int = q
        self.width: int = field_width(q)

    def params(self) -> Tuple[int, ...]:
        return (self.n, self.d, self.q)

    def validate(self, w: MatrixFq) -> None:
        if not isinstance(w, MatrixFq):
            raise DomainError(f"expected a MatrixFq generator matrix, got {type(w).__name__}")
        if w.shape != (self.d, self.n) or w.q != self.q:
            raise DomainError(f"generator matrix must be {self.d} x {self.n} over F_{self.q}")
        if fq_linalg.rank(w) != self.d:
            raise DomainError(f"generator matrix has rank below {self.d}")

    # Column i moves to position h(i).
    def act(self, h: Permutation, w: MatrixFq) -> MatrixFq:
        self._check_degree(h)
        return MatrixFq(w.data[:, self._pullback(h)], self.q)

    def invariant(self, w: MatrixFq) -> Bits:
        return _entries_to_bits(fq_linalg.rref(w).data, self.width)

    def from_invariant(self, bits: Bits) -> MatrixFq:
        values: List[int] = _bits_to_entries(bits, self.d * self.n, self.width, self.q)
        w: MatrixFq = MatrixFq(np.array(values, dtype=np.int64).reshape(self.d, self.n), self.q)
        self.validate(w)
        return w

    def invariant_length(self) -> int:
        return self.d * self.n * self.width


class ConjugacyKind(SymmetricKind):
    """
    Subgroups of S_n given by generator lists, acted on by conjugation. The
    invariant is the normal form, written as a count followed by Lehmer
    ranks and zero-padded to a fixed length.
    """
    name = "conjugacy"
    tag = 2

    def __init__(self, n: int):
        super().__init__(n)
        self.max_generators: int = n * (n - 1) // 2
        self.count_width: int = field_width(self.max_generators + 1)
        self.rank_width: int = field_width(factorial(n))

    def params(self) -> Tuple[int, ...]:
        return (self.n,)

    def validate(self, w: Tuple[Permutation, ...]) -> None:
        if not isinstance(w, tuple) or not all(isinstance(g, Permutation) for g in w):
            raise DomainError("expected a tuple of permutations")
        for g in w:
            self._check_degree(g)

    # Returns pi^-1 gamma pi for every generator gamma.
    def act(self, h: Permutation, w: Tuple[Permutation, ...]) -> Tuple[Permutation, ...]:
        self._check_degree(h)
        h_inv: Permutation = inverse(h)
        return tuple(compose(h_inv, compose(g, h)) for g in w)

    def invariant(self, w: Tuple[Permutation, ...]) -> Bits:
        nf: List[Permutation] = normal_form(list(w))
        writer: BitWriter = BitWriter().write_uint(len(nf), self.count_width)
        for g in nf:
            writer.write_uint(lehmer_rank(g), self.rank_width)
        body: Bits = writer.getvalue()
        return body + "0" * (self.invariant_length() - len(body))

    def from_invariant(self, bits: Bits) -> Tuple[Permutation, ...]:
        if len(bits) != self.invariant_length():
            raise DomainError(f"a conjugacy invariant has {self.invariant_length()} bits, got {len(bits)}")
        reader: BitReader = BitReader(bits)
        count: int = reader.read_uint(self.count_width)
        if count > self.max_generators:
            raise DomainError(f"normal form cannot hold {count} generators in degree {self.n}")
        try:
            gens: Tuple[Permutation, ...] = tuple(
                lehmer_unrank(reader.read_uint(self.rank_width), self.n) for _ in range(count)
            )
        except ReductionError as e:
            raise DomainError(f"malformed conjugacy invariant\n|- {e}")
        if "1" in reader.read_bits(reader.remaining):
            raise DomainError("conjugacy invariant padding must be zero")
        return gens

    def invariant_length(self) -> int:
        return self.count_width + self.max_generators * self.rank_width


class MatrixSpaceKind(Kind):
    """
    d-dimensional spaces of n x n matrices over F_q, acted on by
    X: M -> X M X^-1. The invariant is the RREF of the d x n^2 matrix whose
    rows are the flattened basis matrices.
    """
    name = "matrix-space"
    tag = 3

    def __init__(self, n: int, d: int, q: int):
        super().__init__()
        if not fq_linalg.is_prime(q):
            raise DomainError(f"q = {q} is not prime")
        if n < 1 or not 1 <= d <= n * n:
            raise DomainError(f"need n >= 1 and 1 <= d <= n^2, got n={n}, d={d}")
        self.n: int = n
        self.d: int = d
        self.q: int = q
        self.width: int = field_width(q)

    def params(self) -> Tuple[int, ...]:
        return (self.n, self.d, self.q)

    def group_order(self) -> BigIndex:
        return fq_linalg.gl_order(self.n, self.q)

    def identity(self) -> MatrixFq:
        return MatrixFq.identity(self.n, self.q)

    # Apply g first: as matrices the product is h @ g.
    def compose(self, g: MatrixFq, h: MatrixFq) -> MatrixFq:
        return fq_linalg.matmul(h, g)

    def inverse(self, g: MatrixFq) -> MatrixFq:
        return fq_linalg.inverse(g)

    def random_element(self, rng: np.random.Generator) -> MatrixFq:
        return fq_linalg.random_gl(self.n, self.q, rng)

    def unrank_element(self, k: BigIndex) -> MatrixFq:
        return fq_linalg.gl_unrank(k, self.n, self.q)

    def rank_element(self, g: MatrixFq) -> BigIndex:
        return fq_linalg.gl_rank(g)

    def perm_degree(self) -> int:
        return fq_linalg.gl_perm_degree(self.n, self.q)

    def to_permutation(self, g: MatrixFq) -> Permutation:
        return fq_linalg.gl_to_permutation(g)

    def from_permutation(self, p: Permutation) -> MatrixFq:
        return fq_linalg.permutation_to_gl(p, self.n, self.q)

    def _perm_generators(self) -> List[Permutation]:
        return [fq_linalg.gl_to_permutation(g) for g in fq_linalg.gl_generators(self.n, self.q)]

    def _stacked(self, w: Sequence[MatrixFq]) -> MatrixFq:
        return MatrixFq(np.array([m.data.reshape(-1) for m in w], dtype=np.int64), self.q)

    def validate(self, w: Tuple[MatrixFq, ...]) -> None:
        if not isinstance(w, tuple) or len(w) != self.d:
            raise DomainError(f"expected a tuple of {self.d} basis matrices")
        for m in w:
            if not isinstance(m, MatrixFq) or m.shape != (self.n, self.n) or m.q != self.q:
                raise DomainError(f"basis matrices must be {self.n} x {self.n} over F_{self.q}")
        if fq_linalg.rank(self._stacked(w)) != self.d:
            raise DomainError("basis matrices are linearly dependent")

    def act(self, h: MatrixFq, w: Tuple[MatrixFq, ...]) -> Tuple[MatrixFq, ...]:
        if h.shape != (self.n, self.n) or h.q != self.q:
            raise DomainError(f"GL element must be {self.n} x {self.n} over F_{self.q}")
        h_inv: MatrixFq = fq_linalg.inverse(h)
        return tuple(h @ m @ h_inv for m in w)

    def invariant(self, w: Tuple[MatrixFq, ...]) -> Bits:
        return _entries_to_bits(fq_linalg.rref(self._stacked(w)).data, self.width)

    def from_invariant(self, bits: Bits) -> Tuple[MatrixFq, ...]:
        values: List[int] = _bits_to_entries(bits, self.d * self.n * self.n, self.width, self.q)
        rows: np.ndarray = np.array(values, dtype=np.int64).reshape(self.d, self.n, self.n)
        w: Tuple[MatrixFq, ...] = tuple(MatrixFq(rows[i], self.q) for i in range(self.d))
        self.validate(w)
        return w

    def invariant_length(self) -> int:
        return self.d * self.n * self.n * self.width


KIND_NAMES: Dict[str, int] = {"graph": 0, "code": 1, "conjugacy": 2, "matrix-space": 3}


# Rebuilds a kind from its tag and params.
def make_kind(tag: int, params: Sequence[int]) -> Kind:
    try:
        if tag == GraphKind.tag:
            (n,) = params
            return GraphKind(n)
        if tag == CodeKind.tag:
            n, d, q = params
            return CodeKind(n, d, q)
        if tag == ConjugacyKind.tag:
            (n,) = params
            return ConjugacyKind(n)
        if tag == MatrixSpaceKind.tag:
            n, d, q = params
            return MatrixSpaceKind(n, d, q)
    except ValueError:
        raise DomainError(f"kind tag {tag} takes different params, got {tuple(params)}")
    raise DomainError(f"unknown kind tag {tag}")


# --- Generic operations ---

def act(kind: Kind, h: GroupElement, w: UniverseElement) -> UniverseElement:
    return kind.act(h, w)


def complete_invariant(kind: Kind, w: UniverseElement) -> Bits:
    return kind.invariant(w)


def sample_isomorphic_copy(kind: Kind, w: UniverseElement, rng: np.random.Generator) -> Bits:
    """The invariant of h(w) for a uniformly random h in H."""
    return kind.invariant(kind.act(kind.random_element(rng), w))


@dataclass(frozen=True)
class IsoInstance:
    """Two universe elements of one kind: is some h in H mapping x0 to x1?"""
    kind: Kind
    x0: UniverseElement
    x1: UniverseElement

    def __post_init__(self) -> None:
        self.kind.validate(self.x0)
        self.kind.validate(self.x1)

    def side(self, r: int) -> UniverseElement:
        return self.x1 if r else self.x0


class OrbitTable:
    """
    Every image of one object, found by running through all of H.

    Maps each invariant in the orbit to the first group element producing it,
    and collects the elements fixing the object (its automorphism group).
    This is the exhaustive inverter used at desk scale.
    """

    def __init__(self, kind: Kind, w: UniverseElement, limit: Optional[int] = None):
        """
        Raises:
            DomainError: If |H| exceeds limit.
        """
        self.kind: Kind = kind
        self.base: UniverseElement = w
        self.base_invariant: Bits = kind.invariant(w)
        self.table: Dict[Bits, GroupElement] = {}
        self.automorphisms: List[GroupElement] = []
        for h in kind.group_elements(limit):
            y: Bits = kind.invariant(kind.act(h, w))
            self.table.setdefault(y, h)
            if y == self.base_invariant:
                self.automorphisms.append(h)
        logger.debug(f"Orbit table for {kind!r}: orbit {len(self.table)}, |Aut| {len(self.automorphisms)}")

    @property
    def orbit_size(self) -> int:
        return len(self.table)

    @property
    def aut_order(self) -> int:
        return len(self.automorphisms)

    # Returns some h with invariant(act(h, base)) == y, or None outside the orbit.
    def lookup(self, y: Bits) -> Optional[GroupElement]:
        return self.table.get(y)
