"""
Instance generators for tests and experiments.
"""

from typing import List, Optional, Tuple

import numpy as np

from libs.fields import fq_linalg
from libs.fields.fq_linalg import MatrixFq
from libs.interfaces.errors import BuildFailure, DomainError
from libs.iso.framework import (
    CodeKind, ConjugacyKind, Graph, GraphKind, GroupElement, IsoInstance, Kind, MatrixSpaceKind, OrbitTable,
    UniverseElement,
)

MAX_TRIES: int = 10_000


def random_graph(n: int, rng: np.random.Generator, p: float = 0.5) -> Graph:
    upper: np.ndarray = np.triu((rng.random((n, n)) < p).astype(np.uint8), 1)
    return Graph(upper + upper.T)


# Draws a full-rank matrix of the given shape.
def _random_full_rank(rows: int, cols: int, q: int, rng: np.random.Generator) -> MatrixFq:
    for _ in range(MAX_TRIES):
        m: MatrixFq = MatrixFq(rng.integers(0, q, size=(rows, cols)), q)
        if fq_linalg.rank(m) == rows:
            return m
    raise BuildFailure(f"no full-rank {rows} x {cols} matrix over F_{q} in {MAX_TRIES} draws")


def random_object(kind: Kind, rng: np.random.Generator) -> UniverseElement:
    """A random well-formed element of the universe of kind."""
    if isinstance(kind, GraphKind):
        return random_graph(kind.n, rng)
    if isinstance(kind, CodeKind):
        return _random_full_rank(kind.d, kind.n, kind.q, rng)
    if isinstance(kind, ConjugacyKind):
        count: int = int(rng.integers(1, 4))
        return tuple(kind.random_element(rng) for _ in range(count))
    if isinstance(kind, MatrixSpaceKind):
        stacked: MatrixFq = _random_full_rank(kind.d, kind.n * kind.n, kind.q, rng)
        return tuple(MatrixFq(stacked.data[i].reshape(kind.n, kind.n), kind.q) for i in range(kind.d))
    raise DomainError(f"cannot draw objects of {kind!r}")


def relabel(kind: Kind, w: UniverseElement, rng: np.random.Generator) -> Tuple[UniverseElement, GroupElement]:
    """Returns (h(w), h) for a uniformly random h."""
    h: GroupElement = kind.random_element(rng)
    return kind.act(h, w), h


def aut_order(kind: Kind, w: UniverseElement) -> int:
    return OrbitTable(kind, w).aut_order


def random_graph_with_aut(n: int, rng: np.random.Generator, low: int = 1, high: int = 1) -> Tuple[Graph, OrbitTable]:
    """
    A random graph whose automorphism group has order in [low, high], with
    its orbit table.

    Raises:
        BuildFailure: If no such graph turns up in MAX_TRIES draws.
    """
    kind: GraphKind = GraphKind(n)
    for _ in range(MAX_TRIES):
        # Sparser draws reach larger automorphism groups.
        g: Graph = random_graph(n, rng, p=float(rng.choice([0.2, 0.35, 0.5])) if high > 1 else 0.5)
        table: OrbitTable = OrbitTable(kind, g)
        if low <= table.aut_order <= high:
            return g, table
    raise BuildFailure(f"no {n}-vertex graph with {low} <= |Aut| <= {high} in {MAX_TRIES} draws")


def rigid_pair(n: int, rng: np.random.Generator, isomorphic: bool) -> Tuple[IsoInstance, Optional[GroupElement]]:
    """
    Two rigid n-vertex graphs, either a random relabelling of one graph or
    two graphs verified non-isomorphic by orbit table.

    Returns:
        The instance and, for an isomorphic pair, the witness sending x0 to x1.
    """
    return graph_pair(n, rng, isomorphic, 1, 1)


def graph_pair(n: int, rng: np.random.Generator, isomorphic: bool, low: int = 1,
               high: int = 1) -> Tuple[IsoInstance, Optional[GroupElement]]:
    kind: GraphKind = GraphKind(n)
    g0, table = random_graph_with_aut(n, rng, low, high)
    if isomorphic:
        g1, h = relabel(kind, g0, rng)
        return IsoInstance(kind, g0, g1), h
    for _ in range(MAX_TRIES):
        g1, _ = random_graph_with_aut(n, rng, low, high)
        if table.lookup(kind.invariant(g1)) is None:
            return IsoInstance(kind, g0, g1), None
    raise BuildFailure(f"no non-isomorphic partner found in {MAX_TRIES} draws")


def mixed_pairs(count: int, n: int, rng: np.random.Generator, low: int = 1,
                high: int = 1) -> List[Tuple[IsoInstance, bool]]:
    """Alternating isomorphic and non-isomorphic graph pairs, with their truth."""
    pairs: List[Tuple[IsoInstance, bool]] = []
    for i in range(count):
        isomorphic: bool = i % 2 == 0
        pairs.append((graph_pair(n, rng, isomorphic, low, high)[0], isomorphic))
    return pairs
