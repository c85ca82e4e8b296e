"""
Linear algebra over a prime field F_q.

Matrices are immutable wrappers around int64 numpy arrays reduced mod q.
The module covers reduced row echelon forms (a complete invariant of a row
span), the general linear group GL_n(F_q) (order, a mixed-radix indexing,
uniform sampling, generators) and the permutation representation of
GL_n(F_q) on the nonzero vectors of F_q^n.
"""

from functools import lru_cache
from math import prod
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from libs.groups.perm_core import Permutation
from libs.interfaces.errors import DomainError, RangeError
from libs.interfaces.typing import BigIndex, as_index
from libs.utils.pylog import Logger

logger = Logger(__name__)


# Trial-division primality test.
@lru_cache(maxsize=None)
def is_prime(q: int) -> bool:
    if q < 2:
        return False
    d: int = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def _require_prime(q: int) -> None:
    if not is_prime(q):
        raise DomainError(f"q = {q} is not prime; only prime fields are supported")


class MatrixFq:
    """
    A rows x cols matrix over F_q.

    Equality and hashing follow (q, shape, entries), so matrices work as
    dictionary keys.
    """
    __slots__ = ("q", "data")

    def __init__(self, entries, q: int):
        """
        Args:
            entries: Anything numpy can turn into a 2-D integer array.
            q: A prime modulus.

        Raises:
            DomainError: If q is not prime or the entries are not a 2-D table.
        """
        _require_prime(q)
        data: np.ndarray = np.array(entries, dtype=np.int64)
        if data.ndim != 2:
            raise DomainError(f"a matrix needs a 2-D table of entries, got {data.ndim} dimensions")
        data %= q
        data.setflags(write=False)
        self.q: int = q
        self.data: np.ndarray = data

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @classmethod
    def identity(cls, n: int, q: int) -> "MatrixFq":
        return cls(np.eye(n, dtype=np.int64), q)

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> "MatrixFq":
        return cls(np.zeros((rows, cols), dtype=np.int64), q)

    def to_lists(self) -> List[List[int]]:
        return [[int(v) for v in row] for row in self.data]

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        return matmul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixFq):
            return NotImplemented
        return self.q == other.q and self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.q, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"MatrixFq(q={self.q}, {self.to_lists()})"

    def format(self) -> str:
        return format_matrix(self)


# --- Text format ---

def format_matrix(m: MatrixFq) -> str:
    lines: List[str] = [f"{m.rows} {m.cols} {m.q}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in m.data)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> MatrixFq:
    """
    Parses the matrix format: a "rows cols q" header, then one line per row.

    Raises:
        DomainError: On a malformed header, a wrong row count or a wrong row length.
    """
    lines: List[str] = [line for line in text.splitlines() if line.strip()]
    return _parse_matrix_lines(lines)


def _parse_matrix_lines(lines: Sequence[str]) -> MatrixFq:
    if not lines:
        raise DomainError("empty matrix text")
    try:
        rows, cols, q = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise DomainError(f"matrix header must be 'rows cols q'\n|- {lines[0]!r}")
    body: Sequence[str] = lines[1:]
    if len(body) != rows:
        raise DomainError(f"header announces {rows} rows, found {len(body)}")
    table: List[List[int]] = []
    for line in body:
        try:
            row: List[int] = [int(tok) for tok in line.split()]
        except ValueError:
            raise DomainError(f"matrix row is not a list of integers\n|- {line!r}")
        if len(row) != cols:
            raise DomainError(f"expected {cols} entries per row\n|- {line!r}")
        table.append(row)
    if rows == 0:
        return MatrixFq(np.zeros((0, cols), dtype=np.int64), q)
    return MatrixFq(table, q)


# --- Basic arithmetic ---

def matmul(a: MatrixFq, b: MatrixFq) -> MatrixFq:
    if a.q != b.q:
        raise DomainError(f"field mismatch: F_{a.q} vs F_{b.q}")
    if a.cols != b.rows:
        raise DomainError(f"shape mismatch: {a.shape} @ {b.shape}")
    return MatrixFq(a.data @ b.data, a.q)


def rref_with_transform(m: MatrixFq) -> Tuple[MatrixFq, MatrixFq, List[int]]:
    """
    Gauss-Jordan elimination that also records the row operations.

    Returns:
        (R, T, pivots) with R = T @ m the reduced row echelon form, T
        invertible, and pivots the pivot columns in increasing order.
    """
    q: int = m.q
    a: np.ndarray = m.data.copy()
    t: np.ndarray = np.eye(m.rows, dtype=np.int64)
    pivots: List[int] = []
    row: int = 0
    for col in range(m.cols):
        if row == m.rows:
            break
        nonzero: np.ndarray = np.nonzero(a[row:, col])[0]
        if nonzero.size == 0:
            continue
        p: int = row + int(nonzero[0])
        if p != row:
            a[[row, p]] = a[[p, row]]
            t[[row, p]] = t[[p, row]]
        scale: int = pow(int(a[row, col]), -1, q)
        a[row] = a[row] * scale % q
        t[row] = t[row] * scale % q
        for other in range(m.rows):
            factor: int = int(a[other, col])
            if other != row and factor:
                a[other] = (a[other] - factor * a[row]) % q
                t[other] = (t[other] - factor * t[row]) % q
        pivots.append(col)
        row += 1
    return MatrixFq(a, q), MatrixFq(t, q), pivots


# Returns the reduced row echelon form; zero rows stay at the bottom.
def rref(m: MatrixFq) -> MatrixFq:
    return rref_with_transform(m)[0]


def rank(m: MatrixFq) -> int:
    return len(rref_with_transform(m)[2])


def is_invertible(m: MatrixFq) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def determinant(m: MatrixFq) -> int:
    """
    Determinant mod q by elimination.

    Raises:
        DomainError: If m is not square.
    """
    if m.rows != m.cols:
        raise DomainError(f"determinant of a non-square {m.shape} matrix")
    q: int = m.q
    a: np.ndarray = m.data.copy()
    det: int = 1
    for col in range(m.cols):
        nonzero: np.ndarray = np.nonzero(a[col:, col])[0]
        if nonzero.size == 0:
            return 0
        p: int = col + int(nonzero[0])
        if p != col:
            a[[col, p]] = a[[p, col]]
            det = -det
        pivot: int = int(a[col, col])
        det = det * pivot % q
        inv: int = pow(pivot, -1, q)
        for other in range(col + 1, m.rows):
            factor: int = int(a[other, col]) * inv % q
            if factor:
                a[other] = (a[other] - factor * a[col]) % q
    return det % q


def inverse(m: MatrixFq) -> MatrixFq:
    """
    Raises:
        DomainError: If m is singular or not square.
    """
    if not is_invertible(m):
        raise DomainError(f"matrix is singular over F_{m.q}\n|- {m.to_lists()}")
    return rref_with_transform(m)[1]


# Lists every vector of the row span, each as a tuple.
def row_span(m: MatrixFq) -> List[Tuple[int, ...]]:
    q: int = m.q
    vectors: List[Tuple[int, ...]] = []
    for coeffs in _all_vectors(m.rows, q):
        v: np.ndarray = np.array(coeffs, dtype=np.int64) @ m.data % q if m.rows else np.zeros(m.cols, dtype=np.int64)
        vectors.append(tuple(int(x) for x in v))
    return sorted(set(vectors))


def _all_vectors(length: int, q: int) -> Iterable[Tuple[int, ...]]:
    for value in range(q ** length):
        yield _digits(value, length, q)


# Base-q digits of value, most significant first.
def _digits(value: int, length: int, q: int) -> Tuple[int, ...]:
    out: List[int] = [0] * length
    for pos in range(length - 1, -1, -1):
        value, out[pos] = divmod(value, q)
    return tuple(out)


def _from_digits(digits: Iterable[int], q: int) -> int:
    value: int = 0
    for d in digits:
        value = value * q + int(d)
    return value


# --- GL_n(F_q) ---

def gl_order(n: int, q: int) -> BigIndex:
    """
    |GL_n(F_q)| = prod_{i=1..n} (q^n - q^{i-1}).

    Raises:
        DomainError: If n < 1 or q is not prime.
    """
    _require_prime(q)
    if n < 1:
        raise DomainError(f"dimension must be at least 1, got {n}")
    return prod(q ** n - q ** i for i in range(n))


def _complement_columns(pivots: Sequence[int], n: int) -> List[int]:
    taken: set = set(pivots)
    return [c for c in range(n) if c not in taken]


def gl_unrank(k: BigIndex, n: int, q: int) -> MatrixFq:
    """
    Decodes an index into an invertible matrix, one row at a time.

    Row i (0-based, i rows already built) takes a digit d < q^n - q^i of a
    mixed-radix number whose first row is most significant. The low part
    d mod q^i picks a combination of the earlier rows; d // q^i + 1 picks a
    nonzero combination of the unit vectors at the non-pivot columns of
    rref(earlier rows), which puts the new row outside their span.

    Raises:
        RangeError: If k >= |GL_n(F_q)|.
    """
    as_index(k, "GL index")
    order: BigIndex = gl_order(n, q)
    if k >= order:
        raise RangeError(f"GL index {k} is out of range for GL_{n}(F_{q}) (order {order})")

    radices: List[int] = [q ** n - q ** i for i in range(n)]
    digits: List[int] = [0] * n
    for i in range(n - 1, -1, -1):
        k, digits[i] = divmod(k, radices[i])

    rows: List[np.ndarray] = []
    for i, d in enumerate(digits):
        high, low = divmod(d, q ** i)
        combo: np.ndarray = np.zeros(n, dtype=np.int64)
        if i:
            prior: np.ndarray = np.array(rows, dtype=np.int64)
            coeffs: Tuple[int, ...] = _digits(low, i, q)
            combo = np.array(coeffs, dtype=np.int64) @ prior % q
            pivots: List[int] = rref_with_transform(MatrixFq(prior, q))[2]
        else:
            pivots = []
        free: List[int] = _complement_columns(pivots, n)
        extra: Tuple[int, ...] = _digits(high + 1, len(free), q)
        for col, a in zip(free, extra):
            combo[col] = (combo[col] + a) % q
        rows.append(combo)
    return MatrixFq(np.array(rows, dtype=np.int64), q)


def gl_rank(m: MatrixFq) -> BigIndex:
    """
    Inverse of gl_unrank.

    Raises:
        DomainError: If m is not square and invertible.
    """
    if not is_invertible(m):
        raise DomainError(f"gl_rank needs an invertible matrix\n|- {m.to_lists()}")
    n: int = m.rows
    q: int = m.q
    k: BigIndex = 0
    for i in range(n):
        row: np.ndarray = m.data[i]
        if i:
            r, t, pivots = rref_with_transform(MatrixFq(m.data[:i], q))
            along: np.ndarray = row[pivots]
            residual: np.ndarray = (row - along @ r.data) % q
            coeffs: np.ndarray = along @ t.data % q
            low: int = _from_digits(coeffs, q)
        else:
            pivots = []
            residual = row
            low = 0
        free: List[int] = _complement_columns(pivots, n)
        high: int = _from_digits(residual[free], q) - 1
        digit: int = low + high * q ** i
        k = k * (q ** n - q ** i) + digit
    return k


def random_gl(n: int, q: int, rng: np.random.Generator) -> MatrixFq:
    """Uniform element of GL_n(F_q) by rejection sampling of random matrices."""
    _require_prime(q)
    while True:
        candidate: MatrixFq = MatrixFq(rng.integers(0, q, size=(n, n)), q)
        if is_invertible(candidate):
            return candidate


@lru_cache(maxsize=None)
def primitive_root(q: int) -> int:
    _require_prime(q)
    if q == 2:
        return 1
    factors: List[int] = []
    rest: int = q - 1
    d: int = 2
    while d * d <= rest:
        if rest % d == 0:
            factors.append(d)
            while rest % d == 0:
                rest //= d
        d += 1
    if rest > 1:
        factors.append(rest)
    for g in range(2, q):
        if all(pow(g, (q - 1) // f, q) != 1 for f in factors):
            return g
    raise DomainError(f"no primitive root mod {q}")


def gl_generators(n: int, q: int) -> List[MatrixFq]:
    """Elementary transvections I + E_ij plus diag(g, 1, ..., 1) for a primitive root g."""
    gens: List[MatrixFq] = []
    for i in range(n):
        for j in range(n):
            if i != j:
                e: np.ndarray = np.eye(n, dtype=np.int64)
                e[i, j] = 1
                gens.append(MatrixFq(e, q))
    g: int = primitive_root(q)
    if g != 1:
        d: np.ndarray = np.eye(n, dtype=np.int64)
        d[0, 0] = g
        gens.append(MatrixFq(d, q))
    return gens


# --- Permutation representation on nonzero vectors ---

# Point p stands for the vector whose base-q digits (most significant first) spell p.
def vector_point(v: Sequence[int], q: int) -> int:
    return _from_digits(v, q)


def point_vector(p: int, n: int, q: int) -> Tuple[int, ...]:
    return _digits(p, n, q)


@lru_cache(maxsize=None)
def _point_table(n: int, q: int) -> np.ndarray:
    return np.array([point_vector(p, n, q) for p in range(1, q ** n)], dtype=np.int64).T


def gl_to_permutation(x: MatrixFq) -> Permutation:
    """
    The permutation v -> X v of the q^n - 1 nonzero vectors.
    compose(pi_X, pi_Y) is pi_(Y @ X).
    """
    if x.rows != x.cols:
        raise DomainError(f"non-square {x.shape} matrix has no action on vectors")
    n, q = x.rows, x.q
    images: np.ndarray = x.data @ _point_table(n, q) % q
    weights: np.ndarray = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return Permutation(tuple(int(p) for p in weights @ images))


def permutation_to_gl(p: Permutation, n: int, q: int) -> MatrixFq:
    """
    Reads X off the images of the unit vectors.

    Raises:
        DomainError: If p is not the image of a matrix.
    """
    if p.degree != q ** n - 1:
        raise DomainError(f"degree {p.degree} does not match GL_{n}(F_{q}) acting on {q ** n - 1} vectors")
    columns: List[Tuple[int, ...]] = []
    for j in range(n):
        unit: List[int] = [0] * n
        unit[j] = 1
        columns.append(point_vector(p(vector_point(unit, q)), n, q))
    x: MatrixFq = MatrixFq(np.array(columns, dtype=np.int64).T, q)
    if gl_to_permutation(x) != p:
        raise DomainError(f"{p} is not induced by a linear map of F_{q}^{n}")
    return x


def gl_perm_degree(n: int, q: int) -> int:
    return q ** n - 1
