"""
Permutations of [n] = {1, ..., n} and the Lehmer ranking of S_n.

Products read left to right: ``compose(g, h)`` applies g first, then h.
Ranks are 0-based and follow the lexicographic order of image tables.
"""

from dataclasses import dataclass
from math import factorial
from typing import Iterable, List, Optional, Sequence, Tuple

from libs.interfaces.errors import DomainError, RangeError
from libs.interfaces.typing import BigIndex, Images, Point, as_index


@dataclass(frozen=True, order=True)
class Permutation:
    """
    A bijection on [n] stored as its image table.
    ``images[i - 1]`` is the image of point i. Ordering compares image
    tables lexicographically, so ``min()`` over a coset is its canonical
    representative.
    """
    images: Images

    def __post_init__(self) -> None:
        n: int = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise DomainError(f"not a permutation of [{n}]\n|- images: {list(self.images)}")

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: Point) -> Point:
        return apply(self, i)

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images, start=1))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    # Builds a permutation from disjoint cycles, e.g. [(1, 2), (3, 4)].
    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        images: List[int] = list(range(1, n + 1))
        seen: set = set()
        for cycle in cycles:
            for point in cycle:
                if not 1 <= point <= n or point in seen:
                    raise DomainError(f"bad cycle {tuple(cycle)} on [{n}]")
                seen.add(point)
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a - 1] = b
        return cls(tuple(images))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest point."""
        seen: set = set()
        result: List[Tuple[int, ...]] = []
        for start in range(1, self.degree + 1):
            if start in seen or self.images[start - 1] == start:
                continue
            cycle: List[int] = [start]
            seen.add(start)
            nxt: int = self.images[start - 1]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self.images[nxt - 1]
            result.append(tuple(cycle))
        return result

    def __str__(self) -> str:
        return format_permutation(self)


# Evaluates p at point i.
def apply(p: Permutation, i: Point) -> Point:
    """
    Returns p(i).

    Raises:
        DomainError: If i is outside [n].
    """
    if not 1 <= i <= p.degree:
        raise DomainError(f"point {i} is outside [1, {p.degree}]")
    return p.images[i - 1]


# Returns x -> h(g(x)).
def compose(g: Permutation, h: Permutation) -> Permutation:
    if g.degree != h.degree:
        raise DomainError(f"degree mismatch: {g.degree} vs {h.degree}")
    himg: Images = h.images
    return Permutation(tuple(himg[x - 1] for x in g.images))


def inverse(p: Permutation) -> Permutation:
    result: List[int] = [0] * p.degree
    for i, v in enumerate(p.images, start=1):
        result[v - 1] = i
    return Permutation(tuple(result))


# Ranks p among all of S_n in lexicographic order (0-based).
def lehmer_rank(p: Permutation) -> BigIndex:
    """
    Computes the Lehmer code of p and reads it in the factorial number system.

    Digit i counts the later images smaller than images[i]; a Fenwick tree
    over the unused values keeps the count logarithmic per position.

    Returns:
        The 0-based lexicographic rank, in [0, n!).
    """
    n: int = p.degree
    tree: List[int] = [0] * (n + 1)

    # Marks every value as still unused.
    for v in range(1, n + 1):
        j: int = v
        while j <= n:
            tree[j] += 1
            j += j & -j

    rank: int = 0
    for pos, v in enumerate(p.images):
        smaller: int = 0
        j = v - 1
        while j > 0:
            smaller += tree[j]
            j -= j & -j
        rank = rank * (n - pos) + smaller
        j = v
        while j <= n:
            tree[j] -= 1
            j += j & -j
    return rank


def lehmer_unrank(k: BigIndex, n: int) -> Permutation:
    """
    Inverse of lehmer_rank.

    Args:
        k: A rank in [0, n!).
        n: The degree.

    Raises:
        RangeError: If k >= n!.
    """
    as_index(k, "rank")
    if k >= factorial(n):
        raise RangeError(f"rank {k} is out of range for S_{n} (size {factorial(n)})")

    digits: List[int] = []
    for base in range(1, n + 1):
        k, digit = divmod(k, base)
        digits.append(digit)
    digits.reverse()

    unused: List[int] = list(range(1, n + 1))
    return Permutation(tuple(unused.pop(d) for d in digits))


# --- Text formats ---

def format_permutation(p: Permutation) -> str:
    return " ".join(str(v) for v in p.images)


def parse_permutation(text: str, n: Optional[int] = None) -> Permutation:
    """
    Parses a space-separated image list such as "2 1 3".

    Raises:
        DomainError: On non-integer tokens, a wrong length or a non-bijection.
    """
    try:
        images: Tuple[int, ...] = tuple(int(tok) for tok in text.split())
    except ValueError:
        raise DomainError(f"permutation line is not a list of integers\n|- {text!r}")
    if n is not None and len(images) != n:
        raise DomainError(f"expected {n} images, got {len(images)}\n|- {text!r}")
    return Permutation(images)


def format_generator_list(n: int, generators: Sequence[Permutation]) -> str:
    lines: List[str] = [f"{n} {len(generators)}"]
    lines.extend(format_permutation(g) for g in generators)
    return "\n".join(lines) + "\n"


def parse_generator_list(text: str) -> Tuple[int, List[Permutation]]:
    """
    Parses the generator-list format: a "n k" header, then k permutation lines.

    Returns:
        The degree and the generators.
    """
    lines: List[str] = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DomainError("empty generator list")
    header: List[str] = lines[0].split()
    if len(header) != 2 or not all(tok.isdigit() for tok in header):
        raise DomainError(f"generator list header must be 'n k'\n|- {lines[0]!r}")
    n, k = int(header[0]), int(header[1])
    if len(lines) - 1 != k:
        raise DomainError(f"header announces {k} generators, found {len(lines) - 1}")
    return n, [parse_permutation(line, n) for line in lines[1:]]
