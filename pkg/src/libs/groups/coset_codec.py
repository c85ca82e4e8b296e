"""
Canonical coset representatives, optimal indexing of the left cosets of
Gamma inside H, and a normal form for generator lists.

A left coset is pi Gamma = {compose(pi, g) : g in Gamma}. Its canonical
representative is its lexicographically least member.
"""

from typing import Dict, List, Sequence, Tuple

from libs.interfaces.errors import DomainError, RangeError
from libs.interfaces.typing import BigIndex, Point, as_index
from libs.utils.pylog import Logger

from .group_engine import PermGroup
from .perm_core import Permutation, compose

logger = Logger(__name__)


# Returns the lexicographically least element of the left coset pi Gamma.
def canonical_rep(pi: Permutation, gamma: PermGroup) -> Permutation:
    """
    Fixes images greedily: at position k the image can move anywhere in the
    orbit of pi(k) under the subgroup of Gamma fixing the images already
    chosen, so it is moved to the least point of that orbit.

    Raises:
        DomainError: On a degree mismatch.
    """
    if pi.degree != gamma.degree:
        raise DomainError(f"degree mismatch: {pi.degree} vs {gamma.degree}")
    if gamma.is_trivial():
        return pi

    current: Permutation = pi
    fixed: List[Point] = []
    for k in range(1, pi.degree + 1):
        keeper: PermGroup = gamma.pointwise_stabilizer(fixed)
        if keeper.is_trivial():
            break
        x: Point = current.images[k - 1]
        m: Point = min(keeper.orbit(x))
        if m != x:
            current = compose(current, keeper.transporter(x, m))
        fixed.append(m)
    return current


class CosetIndexing:
    """
    A bijection between [0, |H|/|Gamma|) and the canonical representatives
    of the left cosets pi Gamma with pi in H, in lexicographic order.
    """

    def __init__(self, h: PermGroup, gamma: PermGroup):
        """
        Raises:
            DomainError: If the degrees differ or Gamma is not a subgroup of H.
        """
        if h.degree != gamma.degree:
            raise DomainError(f"degree mismatch: H has {h.degree}, Gamma has {gamma.degree}")
        for g in gamma.generators:
            if not h.contains(g):
                raise DomainError(f"Gamma is not a subgroup of H\n|- generator {g} is not in H")
        self.h: PermGroup = h
        self.gamma: PermGroup = gamma
        self.count: BigIndex = h.order() // gamma.order()
        self._choices: Dict[Tuple[Point, ...], List[Tuple[Point, BigIndex]]] = {}

    # Lists the admissible next images after a prefix, with the number of representatives below each.
    def _level_choices(self, prefix: Tuple[Point, ...], x: Point) -> List[Tuple[Point, BigIndex]]:
        """
        The candidates for the image of position len(prefix)+1 are the
        H_T-orbit points that are least in their Gamma_T-orbit (T = the
        prefix images). Each candidate v heads |H_{T+v}| / |Gamma_{T+v}|
        representatives.
        """
        if prefix not in self._choices:
            h_t: PermGroup = self.h.pointwise_stabilizer(prefix)
            g_t: PermGroup = self.gamma.pointwise_stabilizer(prefix)
            choices: List[Tuple[Point, BigIndex]] = []
            for v in sorted(h_t.orbit(x)):
                if min(g_t.orbit(v)) != v:
                    continue
                extended: Tuple[Point, ...] = prefix + (v,)
                c_v: BigIndex = (
                    self.h.pointwise_stabilizer(extended).order()
                    // self.gamma.pointwise_stabilizer(extended).order()
                )
                choices.append((v, c_v))
            self._choices[prefix] = choices
        return self._choices[prefix]

    def unrank(self, i: BigIndex) -> Permutation:
        """
        Returns the (i+1)-th canonical representative.

        Raises:
            RangeError: If i >= count.
        """
        as_index(i, "coset index")
        if i >= self.count:
            raise RangeError(f"coset index {i} is out of range (count {self.count})")

        sigma: Permutation = self.h.identity()
        prefix: Tuple[Point, ...] = ()
        for k in range(1, self.h.degree + 1):
            x: Point = sigma.images[k - 1]
            chosen: Point = x
            for v, c_v in self._level_choices(prefix, x):
                if i < c_v:
                    chosen = v
                    break
                i -= c_v
            else:
                raise RangeError(f"coset index exhausted the candidates at position {k}")
            if chosen != x:
                h_t: PermGroup = self.h.pointwise_stabilizer(prefix)
                sigma = compose(sigma, h_t.transporter(x, chosen))
            prefix = prefix + (chosen,)
        return sigma

    def rank(self, pi: Permutation) -> BigIndex:
        """
        Returns the index of the coset pi Gamma.

        Raises:
            DomainError: If pi is not in H.
        """
        if not self.h.contains(pi):
            raise DomainError(f"{pi} is not an element of H")
        sigma: Permutation = canonical_rep(pi, self.gamma)

        index: BigIndex = 0
        prefix: Tuple[Point, ...] = ()
        for k in range(1, self.h.degree + 1):
            x: Point = sigma.images[k - 1]
            for v, c_v in self._level_choices(prefix, x):
                if v >= x:
                    break
                index += c_v
            prefix = prefix + (x,)
        return index


def coset_unrank(idx: CosetIndexing, i: BigIndex) -> Permutation:
    return idx.unrank(i)


def coset_rank(idx: CosetIndexing, pi: Permutation) -> BigIndex:
    return idx.rank(pi)


# Returns the same generator list for every list generating the same group.
def normal_form(generators: Sequence[Permutation]) -> List[Permutation]:
    """
    Walks the chain of G = <generators> with base 1, 2, ..., n. For every
    level i and every point j != i in the orbit of i under G_[i-1] (the
    pointwise stabilizer of 1..i-1), it emits the least element of the set
    of elements of G_[i-1] that send i to j. That set depends only on G, so
    the output does too, and the emitted elements generate G.

    Returns:
        The normal form; empty for the trivial group.

    Raises:
        DomainError: If the generators have different degrees.
    """
    if not generators:
        return []
    n: int = generators[0].degree
    group: PermGroup = PermGroup(n, generators)
    if group.is_trivial():
        return []

    result: List[Permutation] = []
    for i in range(1, n + 1):
        level: PermGroup = group.pointwise_stabilizer(range(1, i))
        if level.is_trivial():
            break
        for j in sorted(level.orbit(i)):
            if j == i:
                continue
            result.append(_least_transporter(level, i, j))
    return result


# Least element of G_[i-1] sending i to j, fixing later images greedily.
def _least_transporter(level: PermGroup, i: Point, j: Point) -> Permutation:
    n: int = level.degree
    g: Permutation = level.transporter(i, j)
    # Elements sending i to j are compose(s, g) with s in the stabilizer of 1..i.
    for k in range(i + 1, n + 1):
        keeper: PermGroup = level.pointwise_stabilizer(range(1, k))
        if keeper.is_trivial():
            break
        best: Permutation = g
        for u in keeper.orbit(k):
            candidate: Permutation = compose(keeper.transporter(k, u), g)
            if candidate < best:
                best = candidate
        g = best
    return g
