"""
Entropy estimators for the orbit sampler of an object w.

The entropy of a random isomorphic copy of w is log2 |H| - log2 |Aut(w)|.
log_orbit_overestimate finds automorphisms (so the subgroup it measures is
never larger than Aut(w)) and subtracts the exact order of the group they
generate. entropy_underestimate measures the cost per sample of t copies
under the cost model.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from libs.encoding.cost_oracle import CostReport, Description, explain
from libs.groups.group_engine import PermGroup
from libs.groups.perm_core import Permutation
from libs.interfaces.errors import DomainError
from libs.iso.codecs import coset_hint, element_hint
from libs.iso.framework import GroupElement, IsoInstance, Kind, OrbitTable, UniverseElement
from libs.utils.pylog import Logger

from .reduction import ReductionContext, default_block

logger = Logger(__name__)

EXHAUSTIVE: str = "exhaustive"
SAMPLING: str = "sampling"
STRATEGIES: Tuple[str, ...] = (EXHAUSTIVE, SAMPLING)

# Deviation allowed to the pac estimators.
DELTA: float = 0.25


class EstimatorMode(enum.Enum):
    PAC_OVER = "pac-over"
    PAC_UNDER = "pac-under"
    PROBABLY_CORRECT_OVER = "probably-correct-over"


@dataclass(frozen=True)
class EstimatorReport:
    value: float
    mode: EstimatorMode
    deviation: float
    trace: Tuple[str, ...] = ()
    # Automorphism generators found on the way, in the permutation representation.
    generators: Tuple[Permutation, ...] = field(default=(), repr=False)


# Keeps only the elements that enlarge the group generated so far.
def _prune(degree: int, elements: Sequence[Permutation]) -> List[Permutation]:
    kept: List[Permutation] = []
    group: PermGroup = PermGroup.trivial(degree)
    for g in elements:
        if g.is_identity() or group.contains(g):
            continue
        kept.append(g)
        group = PermGroup(degree, kept)
    return kept


def aut_generators(kind: Kind, w: UniverseElement, strategy: str, rng: np.random.Generator,
                   table: Optional[OrbitTable] = None, extra_samples: int = 8,
                   limit: Optional[int] = None) -> List[Permutation]:
    """
    Generators of a subgroup of Aut(w), in the permutation representation of H.

    "exhaustive" reads Aut(w) off an orbit table. "sampling" draws
    n + ceil(log2 |H|) + extra_samples random h, inverts each copy h(w)
    through the table to some h' with h'(w) = h(w), and keeps h followed by
    the inverse of h'. Every kept element is checked to fix w.

    Args:
        table: A prebuilt orbit table of w; built here when missing.
        limit: Largest |H| the table may enumerate.

    Returns:
        A pruned generator list; empty when the table cannot be built.

    Raises:
        DomainError: On an unknown strategy.
    """
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy '{strategy}'\n|- expected one of {', '.join(STRATEGIES)}")
    if table is None:
        try:
            table = OrbitTable(kind, w, limit)
        except DomainError as e:
            logger.info(f"No inverter for {kind!r}; reporting the trivial subgroup\n|- {e}")
            return []

    base: str = table.base_invariant
    found: List[GroupElement] = []
    if strategy == EXHAUSTIVE:
        found = list(table.automorphisms)
    else:
        draws: int = kind.perm_degree() + math.ceil(math.log2(kind.group_order())) + extra_samples
        for _ in range(draws):
            h: GroupElement = kind.random_element(rng)
            h_prime: Optional[GroupElement] = table.lookup(kind.invariant(kind.act(h, w)))
            found.append(kind.compose(h, kind.inverse(h_prime)))

    fixing: List[Permutation] = [kind.to_permutation(a) for a in found if kind.invariant(kind.act(a, w)) == base]
    return _prune(kind.perm_degree(), fixing)


def log_orbit_overestimate(kind: Kind, w: UniverseElement, ctx: ReductionContext, rng: np.random.Generator,
                           strategy: str = EXHAUSTIVE, table: Optional[OrbitTable] = None) -> EstimatorReport:
    """
    Estimates log2 of the orbit size of w from above.

    Step one finds automorphism generators, step two takes the exact order of
    the group they generate, step three takes log2 |H|; the estimate is the
    third minus the second. It is exact whenever the generators span Aut(w).

    When no subgroup order can be computed (the permutation representation of
    H is past groups.perm_rep_cap, or H is past groups.closure_cap and no
    table was given) the estimate is entropy_underestimate on harness.t
    samples plus its deviation, capped at log2 |H|.
    """
    log_h: float = math.log2(kind.group_order())
    trace: List[str] = [f"log2|H| = {log_h:.6f}"]
    if not ctx.coset_capable(kind):
        trace.append(f"permutation degree {kind.perm_degree()} exceeds the cap; Aut not measured")
        return _entropy_fallback(kind, w, ctx, rng, log_h, trace)
    if table is None and kind.group_order() > ctx.settings.groups.closure_cap:
        trace.append(f"|H| exceeds the closure cap {ctx.settings.groups.closure_cap}; Aut not measured")
        return _entropy_fallback(kind, w, ctx, rng, log_h, trace)

    gens: List[Permutation] = aut_generators(
        kind, w, strategy, rng, table, ctx.settings.harness.aut_extra_samples, ctx.settings.groups.closure_cap
    )
    aut_order: int = PermGroup(kind.perm_degree(), gens).order()
    trace.append(f"{strategy}: {len(gens)} generators, subgroup order {aut_order}")
    value: float = log_h - math.log2(aut_order)
    return EstimatorReport(max(0.0, value), EstimatorMode.PROBABLY_CORRECT_OVER, 0.0, tuple(trace), tuple(gens))


# Overestimate from the sampled cost per copy, for groups out of reach of Aut.
def _entropy_fallback(kind: Kind, w: UniverseElement, ctx: ReductionContext, rng: np.random.Generator,
                      log_h: float, trace: List[str]) -> EstimatorReport:
    under: EstimatorReport = entropy_underestimate(kind, w, ctx.settings.harness.t, ctx, rng)
    trace.extend(under.trace)
    trace.append(f"fallback: min(log2|H|, {under.value:.6f} + {under.deviation})")
    return EstimatorReport(min(log_h, under.value + under.deviation), EstimatorMode.PAC_OVER, DELTA, tuple(trace))


def entropy_underestimate(kind: Kind, w: UniverseElement, t: int, ctx: ReductionContext, rng: np.random.Generator,
                          aut: Sequence[Permutation] = (), b: Optional[int] = None) -> EstimatorReport:
    """
    Draws t random copies of w and reports cost(y) / t.

    The hints are the element and coset descriptions built from the drawn
    group elements, with `aut` as the coset subgroup.
    """
    if t < 1:
        raise DomainError(f"need t >= 1, got {t}")
    block: int = b if b is not None else default_block(t)
    taus: List[GroupElement] = [kind.random_element(rng) for _ in range(t)]
    y: str = "".join(kind.invariant(kind.act(h, w)) for h in taus)

    hints: List[Description] = [element_hint(ctx.codecs.element(kind), kind, w, taus, block)]
    if ctx.coset_capable(kind):
        hints.append(coset_hint(ctx.codecs.coset, kind, [w], [list(aut)], [(0, h) for h in taus], block))
    report: CostReport = explain(ctx.model, y, hints)
    trace: Tuple[str, ...] = (f"t = {t}, b = {block}", report.line())
    return EstimatorReport(max(0.0, report.total / t), EstimatorMode.PAC_UNDER, DELTA, trace)


def estimate_theta(instance: IsoInstance, t: int, ctx: ReductionContext, rng: np.random.Generator,
                   t_tilde: int = 4096, aut0: Sequence[Permutation] = (),
                   aut1: Sequence[Permutation] = ()) -> Tuple[float, float, float]:
    """
    The two-sided threshold: t (min(s0, s1) + 1/2), where s_i is the
    underestimate for x_i on t_tilde fresh samples.

    Returns:
        (theta, s0, s1).
    """
    s0: float = entropy_underestimate(instance.kind, instance.x0, t_tilde, ctx, rng, aut0).value
    s1: float = entropy_underestimate(instance.kind, instance.x1, t_tilde, ctx, rng, aut1).value
    return t * (min(s0, s1) + 0.5), s0, s1
