"""
Permutation groups given by generators.

A deterministic Schreier-Sims builds a stabilizer chain over a full base
(optional prefix points first, then the remaining points in increasing
order). The chain answers order, membership, exact uniform sampling and
element enumeration; orbits and transporters come from labelled
breadth-first search over the generators.
"""

from math import prod
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from libs.interfaces.errors import DomainError
from libs.interfaces.typing import BigIndex, Point
from libs.utils.pylog import Logger

from .perm_core import Permutation, compose, inverse

logger = Logger(__name__)

# Pointwise stabilizers kept per group before the cache is cleared.
_CACHE_LIMIT: int = 64


class _Level:
    """One link of a stabilizer chain: a base point, its strong generators and a transversal."""
    __slots__ = ("point", "generators", "transversal", "inverses")

    def __init__(self, point: Point, generators: Optional[List[Permutation]] = None):
        self.point: Point = point
        self.generators: List[Permutation] = list(generators or [])
        self.transversal: Dict[Point, Permutation] = {}
        self.inverses: Dict[Point, Permutation] = {}

    # Recomputes the orbit of the base point; transversal[b] maps the base point to b.
    def rebuild(self, degree: int) -> None:
        trans: Dict[Point, Permutation] = {self.point: Permutation.identity(degree)}
        queue: List[Point] = [self.point]
        for beta in queue:
            for s in self.generators:
                gamma: Point = s.images[beta - 1]
                if gamma not in trans:
                    trans[gamma] = compose(trans[beta], s)
                    queue.append(gamma)
        self.transversal = trans
        self.inverses = {b: inverse(u) for b, u in trans.items()}


# Sifts g through levels[start:], returning the residue and where sifting stopped.
def _strip(levels: List[_Level], g: Permutation, start: int = 0) -> Tuple[Permutation, int]:
    for index in range(start, len(levels)):
        level: _Level = levels[index]
        beta: Point = g.images[level.point - 1]
        if beta not in level.inverses:
            return g, index
        if beta != level.point:
            g = compose(g, level.inverses[beta])
    return g, len(levels)


class PermGroup:
    """
    The subgroup of S_n generated by a list of permutations.

    The chain is built on first use and never changes afterwards, so a
    group may be shared freely once a query has run.
    """

    def __init__(self, degree: int, generators: Iterable[Permutation] = (),
                 base_prefix: Sequence[Point] = ()):
        """
        Args:
            degree: n, the size of the permuted set.
            generators: Permutations of [n]; identities are dropped.
            base_prefix: Points placed first in the base, in this order.

        Raises:
            DomainError: On a generator of another degree or a bad prefix point.
        """
        self.degree: int = degree
        gens: List[Permutation] = []
        for g in generators:
            if g.degree != degree:
                raise DomainError(f"generator of degree {g.degree} in a group of degree {degree}")
            if not g.is_identity():
                gens.append(g)
        self.generators: Tuple[Permutation, ...] = tuple(gens)

        prefix: List[Point] = list(base_prefix)
        for p in prefix:
            self._check_point(p)
        if len(set(prefix)) != len(prefix):
            raise DomainError(f"repeated base point in {prefix}")
        self.base: Tuple[Point, ...] = tuple(prefix) + tuple(
            p for p in range(1, degree + 1) if p not in set(prefix)
        )

        self._levels: Optional[List[_Level]] = None
        self._orbits: Dict[Point, Dict[Point, Permutation]] = {}
        self._pointwise: Dict[FrozenSet[Point], "PermGroup"] = {}

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls(degree)

    @classmethod
    def symmetric(cls, degree: int) -> "PermGroup":
        if degree < 2:
            return cls(degree)
        swap: Permutation = Permutation.from_cycles(degree, [(1, 2)])
        cycle: Permutation = Permutation.from_cycles(degree, [tuple(range(1, degree + 1))])
        return cls(degree, [swap, cycle])

    def _check_point(self, i: Point) -> None:
        if not 1 <= i <= self.degree:
            raise DomainError(f"point {i} is outside [1, {self.degree}]")

    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def is_trivial(self) -> bool:
        return not self.generators

    # --- Stabilizer chain ---

    @property
    def chain(self) -> List[_Level]:
        if self._levels is None:
            self._levels = self._schreier_sims()
            logger.debug(
                f"Chain built for degree {self.degree}: order {self.order()}, "
                f"{len(self.generators)} generators"
            )
        return self._levels

    def _schreier_sims(self) -> List[_Level]:
        levels: List[_Level] = [_Level(b) for b in self.base]
        for g in self.generators:
            moved: int = next(i for i, b in enumerate(self.base) if g.images[b - 1] != b)
            for index in range(moved + 1):
                levels[index].generators.append(g)
        for level in levels:
            level.rebuild(self.degree)

        index: int = len(levels) - 1
        while index >= 0:
            jump: Optional[int] = self._close_level(levels, index)
            index = index - 1 if jump is None else jump
        return levels

    # Checks the Schreier generators of one level; extends the chain on the first failure.
    def _close_level(self, levels: List[_Level], index: int) -> Optional[int]:
        level: _Level = levels[index]
        for beta, u_beta in list(level.transversal.items()):
            for s in list(level.generators):
                gamma: Point = s.images[beta - 1]
                schreier: Permutation = compose(compose(u_beta, s), level.inverses[gamma])
                if schreier.is_identity():
                    continue
                residue, stop = _strip(levels, schreier, index + 1)
                if stop < len(levels):
                    for lower in range(index + 1, stop + 1):
                        levels[lower].generators.append(residue)
                        levels[lower].rebuild(self.degree)
                    return stop
        return None

    # --- Queries ---

    def order(self) -> BigIndex:
        """Exact |G|, the product of the transversal sizes."""
        return prod(len(level.transversal) for level in self.chain)

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            raise DomainError(f"degree mismatch: {p.degree} vs {self.degree}")
        residue, _ = _strip(self.chain, p)
        return residue.is_identity()

    def _orbit_transversal(self, u: Point) -> Dict[Point, Permutation]:
        self._check_point(u)
        if u not in self._orbits:
            trans: Dict[Point, Permutation] = {u: self.identity()}
            queue: List[Point] = [u]
            for beta in queue:
                for s in self.generators:
                    gamma: Point = s.images[beta - 1]
                    if gamma not in trans:
                        trans[gamma] = compose(trans[beta], s)
                        queue.append(gamma)
            self._orbits[u] = trans
        return self._orbits[u]

    def orbit(self, i: Point) -> FrozenSet[Point]:
        return frozenset(self._orbit_transversal(i))

    # Returns some g in G with g(u) = v, or None when v is not in the orbit of u.
    def transporter(self, u: Point, v: Point) -> Optional[Permutation]:
        self._check_point(v)
        return self._orbit_transversal(u).get(v)

    def stabilizer(self, v: Point) -> "PermGroup":
        return self.pointwise_stabilizer((v,))

    def pointwise_stabilizer(self, points: Iterable[Point]) -> "PermGroup":
        """
        Returns the subgroup fixing every given point.

        A second chain is built with the points at the front of the base; its
        tail is reused as the chain of the result, with the fixed points
        slotted back in as trivial levels.
        """
        key: FrozenSet[Point] = frozenset(points)
        if not key:
            return self
        if key not in self._pointwise:
            for p in key:
                self._check_point(p)
            prefixed: PermGroup = PermGroup(self.degree, self.generators, base_prefix=sorted(key))
            tail: List[_Level] = prefixed.chain[len(key):]
            result: PermGroup = PermGroup(self.degree, tail[0].generators if tail else ())
            result._levels = _chain_with_fixed_points(self.degree, tail, key)
            if len(self._pointwise) >= _CACHE_LIMIT:
                self._pointwise.clear()
            self._pointwise[key] = result
            return result
        return self._pointwise[key]

    def elements(self, limit: Optional[int] = None) -> List[Permutation]:
        """
        Lists every element by walking the chain.

        Raises:
            DomainError: If the group has more than `limit` elements.
        """
        if limit is not None and self.order() > limit:
            raise DomainError(f"group of order {self.order()} exceeds the enumeration limit {limit}")
        current: List[Permutation] = [self.identity()]
        for level in reversed(self.chain):
            reps: List[Permutation] = list(level.transversal.values())
            current = [compose(g, u) for g in current for u in reps]
        return current

    # Draws an exactly uniform element, one transversal choice per level.
    def uniform_element(self, rng: np.random.Generator) -> Permutation:
        g: Permutation = self.identity()
        for level in reversed(self.chain):
            reps: List[Permutation] = list(level.transversal.values())
            if len(reps) > 1:
                g = compose(g, reps[int(rng.integers(len(reps)))])
        return g

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, generators={[str(g) for g in self.generators]})"


def _chain_with_fixed_points(degree: int, tail: List[_Level], fixed: FrozenSet[Point]) -> List[_Level]:
    levels: List[_Level] = []
    remaining: List[_Level] = list(tail)
    for p in range(1, degree + 1):
        if p in fixed:
            level: _Level = _Level(p)
            level.transversal = {p: Permutation.identity(degree)}
            level.inverses = dict(level.transversal)
            levels.append(level)
        else:
            levels.append(remaining.pop(0))
    # A trivial level shares the strong generators of the level below it.
    below: List[Permutation] = []
    for level in reversed(levels):
        if level.point in fixed:
            level.generators = list(below)
        below = level.generators
    return levels


# --- Random subproducts ---

def random_subproduct(elements: Sequence[Permutation], rng: np.random.Generator) -> Permutation:
    """
    Returns h_1^{r_1} h_2^{r_2} ... h_k^{r_k} for independent fair bits r_i.

    Raises:
        DomainError: If the list is empty.
    """
    if not elements:
        raise DomainError("random subproduct of an empty list")
    bits: np.ndarray = rng.integers(0, 2, size=len(elements))
    g: Permutation = Permutation.identity(elements[0].degree)
    for h, r in zip(elements, bits):
        if r:
            g = compose(g, h)
    return g


class ErdosRenyiSampler:
    """
    Near-uniform sampling from a group through random subproducts.

    The pool starts with the generators and grows by appending random
    subproducts of itself until it holds max(32, 2 L^2 + n) elements, where
    L is the bit length of |G|. Every draw is one random subproduct of the
    pool. No (1 + delta) closeness bound is claimed; uniformity is checked
    empirically.
    """

    def __init__(self, group: PermGroup, rng: np.random.Generator, length: Optional[int] = None):
        self.group: PermGroup = group
        self.rng: np.random.Generator = rng
        self.pool: List[Permutation] = list(group.generators)
        if self.pool:
            bits: int = group.order().bit_length()
            target: int = length if length is not None else max(32, 2 * bits * bits + group.degree)
            while len(self.pool) < target:
                self.pool.append(random_subproduct(self.pool, rng))
            logger.debug(f"Erdos-Renyi pool of {len(self.pool)} elements for a group of order {group.order()}")

    def draw(self, rng: Optional[np.random.Generator] = None) -> Permutation:
        if not self.pool:
            return self.group.identity()
        return random_subproduct(self.pool, rng if rng is not None else self.rng)


def near_uniform_element(group: PermGroup, rng: np.random.Generator) -> Permutation:
    return ErdosRenyiSampler(group, rng).draw()
