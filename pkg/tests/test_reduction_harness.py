# This file contains tests for the reduction, the hint builders and the
# entropy estimators, on small graphs where every figure can be checked by
# enumeration.

import sys
import os
import math
from typing import List, Optional

import numpy as np
import pytest

# Add the 'src' directory to the Python path to allow importing library modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from libs.encoding.cost_oracle import Description
from libs.harness import experiment
from libs.harness.estimators import (
    EXHAUSTIVE, SAMPLING, EstimatorMode, EstimatorReport, aut_generators, entropy_underestimate, estimate_theta,
    log_orbit_overestimate,
)
from libs.harness.experiment import DecisionMode, DecisionRecord, Verdict, decide, decide_with_record
from libs.harness.instances import graph_pair, random_graph_with_aut, random_object, relabel, rigid_pair
from libs.harness.reduction import (
    ERDOS_RENYI, ReductionContext, ReductionOutput, default_block, hint_for_isomorphic, mixture_hint, reduce,
)
from libs.interfaces.errors import DomainError, HintFailure
from libs.iso.codecs import BLOCKED_COSET, FLAT_SCHEME, block_widths, coset_hint, element_hint
from libs.groups.group_engine import PermGroup
from libs.groups.perm_core import Permutation
from libs.iso.framework import CodeKind, ConjugacyKind, Graph, GraphKind, IsoInstance, OrbitTable
from libs.utils.configs import Settings

LOG2_S6: float = math.log2(720)


def _ctx(**sections) -> ReductionContext:
    return ReductionContext.from_settings(Settings.model_validate(sections))


# Tests the default block size.
def test_default_block() -> None:
    """
    ceil(sqrt(t)).
    """
    assert default_block(1) == 1
    assert default_block(10) == 4
    assert default_block(64) == 8
    assert default_block(1024) == 32


# Tests what reduce() draws and records.
@pytest.mark.parametrize('sampler', ["uniform", ERDOS_RENYI])
def test_reduce_transcript(sampler: str) -> None:
    """
    Sample i is the invariant of h_i applied to x_{r_i}; theta = t(s + 1/2).
    """
    rng: np.random.Generator = np.random.default_rng(0)
    instance, _ = graph_pair(5, rng, False, 1, 120)
    output: ReductionOutput = reduce(instance, 40, 3.0, rng, sampler=sampler, seed=17)
    kind: GraphKind = instance.kind
    assert output.theta == 40 * 3.5
    assert output.b == 7
    assert len(output.y) == 40 * 25
    assert output.transcript.seed == 17 and output.transcript.sampler == sampler
    for r, h, y in zip(output.transcript.choices, output.transcript.elements, output.samples):
        assert y == kind.invariant(kind.act(h, instance.side(r)))
    assert set(output.transcript.choices) == {0, 1}


# Tests argument checks of reduce().
def test_reduce_rejects_bad_arguments() -> None:
    """
    t = 0, a negative estimate and unknown samplers are DomainErrors.
    """
    rng: np.random.Generator = np.random.default_rng(1)
    instance, _ = graph_pair(4, rng, True, 1, 24)
    with pytest.raises(DomainError):
        reduce(instance, 0, 1.0, rng)
    with pytest.raises(DomainError):
        reduce(instance, 4, -1.0, rng)
    with pytest.raises(DomainError):
        reduce(instance, 4, 1.0, rng, sampler="schreier")


# Tests that the cost test separates rigid pairs at t = 1024, b = 8.
@pytest.mark.slow
@pytest.mark.parametrize('seed', range(200))
def test_rigid_pairs_are_separated(seed: int) -> None:
    """
    Isomorphic rigid 6-vertex pairs cost at most theta = 1024 (log2 720 + 1/2);
    non-isomorphic ones cost more, even through the two-orbit description.
    """
    rng: np.random.Generator = np.random.default_rng(100 + seed)
    isomorphic: bool = seed % 2 == 0
    instance, _ = rigid_pair(6, rng, isomorphic)
    record: DecisionRecord = decide_with_record(instance, DecisionMode.NO_FALSE_NEGATIVES, rng, t=1024, b=8)
    assert record.s_tilde == pytest.approx(LOG2_S6, abs=1e-9)
    assert record.theta == pytest.approx(1024 * (LOG2_S6 + 0.5))
    if isomorphic:
        assert record.cost <= record.theta
        assert record.verdict is Verdict.ISOMORPHIC
    else:
        assert record.cost > record.theta
        assert record.verdict is Verdict.NON_ISOMORPHIC


# Tests the hints built from a witness.
def test_hint_for_isomorphic_with_witness() -> None:
    """
    With the witness the element and coset hints both decode to y; a
    wrong witness is refused.
    """
    rng: np.random.Generator = np.random.default_rng(2)
    ctx: ReductionContext = ReductionContext.from_settings()
    instance, witness = rigid_pair(6, rng, isomorphic=True)
    output: ReductionOutput = reduce(instance, 64, LOG2_S6, rng, b=8)
    hints: List[Description] = hint_for_isomorphic(output, instance, ctx, witness=witness)
    assert len(hints) == 2 and hints[1].codec_id == BLOCKED_COSET
    for hint in hints:
        assert ctx.model.check(output.y, hint) is None
    with pytest.raises(HintFailure):
        hint_for_isomorphic(output, instance, ctx, witness=instance.kind.identity())


# Tests the hints built by table inversion.
def test_hint_for_isomorphic_with_table() -> None:
    """
    An orbit table of x0 maps every sample back; for a non-isomorphic pair
    the samples of x1 are missing from it.
    """
    rng: np.random.Generator = np.random.default_rng(3)
    ctx: ReductionContext = ReductionContext.from_settings()
    instance, _ = graph_pair(5, rng, True, 1, 120)
    output: ReductionOutput = reduce(instance, 30, 4.0, rng)
    hints = hint_for_isomorphic(output, instance, ctx, table=OrbitTable(instance.kind, instance.x0))
    assert all(ctx.model.check(output.y, h) is None for h in hints)

    other, _ = graph_pair(5, rng, False, 1, 120)
    output = reduce(other, 30, 4.0, rng)
    with pytest.raises(HintFailure):
        hint_for_isomorphic(output, other, ctx, table=OrbitTable(other.kind, other.x0))
    with pytest.raises(HintFailure):
        hint_for_isomorphic(output, other, ctx)


# Tests the two-orbit description.
def test_mixture_hint() -> None:
    """
    The mixture decodes to y without a witness, and is withheld when the
    permutation representation is over the cap.
    """
    rng: np.random.Generator = np.random.default_rng(4)
    instance, _ = graph_pair(5, rng, False, 1, 120)
    ctx: ReductionContext = ReductionContext.from_settings()
    output: ReductionOutput = reduce(instance, 25, 5.0, rng)
    hint: Optional[Description] = mixture_hint(output, instance, ctx)
    assert hint is not None and ctx.model.check(output.y, hint) is None
    assert mixture_hint(output, instance, _ctx(groups={"perm_rep_cap": 2})) is None


# Tests the flat-scheme fallback.
def test_flat_scheme_replaces_coset_hint_over_the_cap() -> None:
    """
    With coset indexing out of reach the second hint is a flat scheme for the
    orbit sampler of x0, and it decodes to y.
    """
    rng: np.random.Generator = np.random.default_rng(5)
    ctx: ReductionContext = _ctx(groups={"perm_rep_cap": 2})
    instance, witness = graph_pair(4, rng, True, 1, 24)
    output: ReductionOutput = reduce(instance, 12, 4.0, rng, b=4)
    hints: List[Description] = hint_for_isomorphic(output, instance, ctx, witness=witness, rng=rng)
    assert [h.codec_id for h in hints][1:] == [FLAT_SCHEME]
    assert ctx.model.check(output.y, hints[1]) is None


# Tests the orbit estimate on graphs with nontrivial automorphisms.
@pytest.mark.parametrize('seed', range(20))
@pytest.mark.parametrize('strategy', [EXHAUSTIVE, SAMPLING])
def test_log_orbit_overestimate_is_exact(seed: int, strategy: str) -> None:
    """
    For 6-vertex graphs with 2 <= |Aut| <= 48 the estimate equals
    log2 720 - log2 |Aut| to within 1e-9, for both strategies.
    """
    rng: np.random.Generator = np.random.default_rng(200 + seed)
    kind: GraphKind = GraphKind(6)
    g, table = random_graph_with_aut(6, rng, 2, 48)
    ctx: ReductionContext = ReductionContext.from_settings()
    report: EstimatorReport = log_orbit_overestimate(kind, g, ctx, rng, strategy, table)
    assert report.mode is EstimatorMode.PROBABLY_CORRECT_OVER
    assert report.value == pytest.approx(LOG2_S6 - math.log2(table.aut_order), abs=1e-9)
    for a in report.generators:
        assert kind.invariant(kind.act(a, g)) == table.base_invariant


# Tests the estimate when subgroup work is out of reach.
def test_log_orbit_overestimate_over_the_cap() -> None:
    """
    Past either cap the estimate is the sampled cost per copy plus its
    deviation, never above log2 |H| and never below log2 |orbit|.
    """
    g: Graph = Graph.from_edges(5, [(1, 2)])
    ctx: ReductionContext = _ctx(groups={"perm_rep_cap": 2}, harness={"t": 64})
    report: EstimatorReport = log_orbit_overestimate(GraphKind(5), g, ctx, np.random.default_rng(6))
    assert report.mode is EstimatorMode.PAC_OVER
    assert report.value == math.log2(120)
    assert report.trace[-1].startswith("fallback: ")

    kind: GraphKind = GraphKind(6)
    w: Graph = Graph.from_edges(6, [(1, 2), (2, 3)])
    ctx = _ctx(groups={"closure_cap": 100}, harness={"t": 64})
    report = log_orbit_overestimate(kind, w, ctx, np.random.default_rng(7))
    under: EstimatorReport = entropy_underestimate(kind, w, 64, ctx, np.random.default_rng(7))
    assert report.mode is EstimatorMode.PAC_OVER
    assert report.value == min(LOG2_S6, under.value + under.deviation)
    assert math.log2(OrbitTable(kind, w).orbit_size) <= report.value <= LOG2_S6
    # A table handed in is used even past the cap.
    exact: EstimatorReport = log_orbit_overestimate(kind, w, ctx, np.random.default_rng(7), table=OrbitTable(kind, w))
    assert exact.mode is EstimatorMode.PROBABLY_CORRECT_OVER


# Tests the automorphism search.
def test_aut_generators() -> None:
    """
    The 4-cycle has the dihedral group of order 8; unknown strategies raise;
    without an affordable table the trivial subgroup is reported.
    """
    rng: np.random.Generator = np.random.default_rng(7)
    kind: GraphKind = GraphKind(4)
    cycle: Graph = Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (4, 1)])
    for strategy in (EXHAUSTIVE, SAMPLING):
        gens: List[Permutation] = aut_generators(kind, cycle, strategy, rng)
        assert PermGroup(4, gens).order() == 8
    with pytest.raises(DomainError):
        aut_generators(kind, cycle, "guess", rng)
    assert aut_generators(GraphKind(6), Graph.from_edges(6, []), EXHAUSTIVE, rng, limit=10) == []


# Tests the per-sample cost estimate.
@pytest.mark.parametrize('seed', range(4))
def test_entropy_underestimate_is_close(seed: int) -> None:
    """
    At t = 1024 the cost per sample lies within 0.3 of log2 |orbit|.
    """
    rng: np.random.Generator = np.random.default_rng(300 + seed)
    kind: GraphKind = GraphKind(6)
    g, table = random_graph_with_aut(6, rng, 1, 12)
    ctx: ReductionContext = ReductionContext.from_settings()
    gens: List[Permutation] = aut_generators(kind, g, EXHAUSTIVE, rng, table)
    report: EstimatorReport = entropy_underestimate(kind, g, 1024, ctx, rng, gens)
    assert report.mode is EstimatorMode.PAC_UNDER
    assert abs(report.value - math.log2(table.orbit_size)) <= 0.3
    with pytest.raises(DomainError):
        entropy_underestimate(kind, g, 0, ctx, rng)


# Cost of the cheapest hint for t_tilde copies of a rigid 6-vertex graph:
# c_machine, the params, and the packed block widths in radix 720.
def _rigid_sample_cost(w: Graph, t_tilde: int, ctx: ReductionContext) -> int:
    kind: GraphKind = GraphKind(6)
    b: int = default_block(t_tilde)
    taus: List[Permutation] = [kind.identity()] * t_tilde
    hints: List[Description] = [
        element_hint(ctx.codecs.element(kind), kind, w, taus, b),
        coset_hint(ctx.codecs.coset, kind, [w], [[]], [(0, h) for h in taus], b),
    ]
    index_bits: int = sum(block_widths(720, t_tilde, b))
    totals: List[int] = []
    for hint in hints:
        report = ctx.model.report(hint)
        assert report.index_bits == index_bits
        assert report.total == ctx.model.c_machine + report.params_bits + index_bits
        totals.append(report.total)
    return min(totals)


# Tests the two-sided threshold.
@pytest.mark.parametrize('t, t_tilde', [(16, 1024), (10, 1000), (7, 50)])
def test_estimate_theta(t: int, t_tilde: int) -> None:
    """
    Each s_i is the packed cost of t_tilde copies divided by t_tilde, and
    theta = t (min(s0, s1) + 1/2), also when t_tilde is not a multiple of
    the block size.
    """
    rng: np.random.Generator = np.random.default_rng(8)
    ctx: ReductionContext = ReductionContext.from_settings()
    instance, _ = rigid_pair(6, rng, isomorphic=True)
    theta, s0, s1 = estimate_theta(instance, t, ctx, rng, t_tilde=t_tilde)
    assert s0 == _rigid_sample_cost(instance.x0, t_tilde, ctx) / t_tilde
    assert s1 == _rigid_sample_cost(instance.x1, t_tilde, ctx) / t_tilde
    assert theta == t * (min(s0, s1) + 0.5)
    assert min(s0, s1) >= LOG2_S6


# Tests that zero-error decisions are never wrong.
@pytest.mark.slow
@pytest.mark.parametrize('seed', range(100))
def test_zero_error_is_never_wrong(seed: int) -> None:
    """
    On pairs with 2 <= |Aut| <= 48 the zero-error decider answers the truth
    or unknown; with the default budget the search is complete, so it always
    answers.
    """
    rng: np.random.Generator = np.random.default_rng(400 + seed)
    isomorphic: bool = seed % 2 == 0
    instance, _ = graph_pair(6, rng, isomorphic, 2, 48)
    truth: Verdict = Verdict.ISOMORPHIC if isomorphic else Verdict.NON_ISOMORPHIC
    assert decide(instance, DecisionMode.ZERO_ERROR, None, rng, t=64) is truth
    assert decide(instance, DecisionMode.NO_FALSE_POSITIVES, None, rng) is truth


# Tests zero-error decisions when the search cannot be complete.
@pytest.mark.slow
def test_zero_error_with_a_sampled_search() -> None:
    """
    Over 100 mixed pairs with 2 <= |Aut| <= 48 and a sampled search of 700
    elements (|S_6| = 720), no verdict is wrong and at most 20 are unknown.
    """
    rng: np.random.Generator = np.random.default_rng(450)
    ctx: ReductionContext = ReductionContext.from_settings()
    wrong: int = 0
    unknown: int = 0
    for trial in range(100):
        isomorphic: bool = trial % 2 == 0
        instance, _ = graph_pair(6, rng, isomorphic, 2, 48)
        verdict: Verdict = decide(instance, DecisionMode.ZERO_ERROR, 700, rng, ctx, t=1024)
        truth: Verdict = Verdict.ISOMORPHIC if isomorphic else Verdict.NON_ISOMORPHIC
        unknown += verdict is Verdict.UNKNOWN
        wrong += verdict not in (truth, Verdict.UNKNOWN)
    assert wrong == 0
    assert unknown <= 20


# Tests that zero-error decisions go through the reduction.
@pytest.mark.parametrize('isomorphic', [True, False])
def test_zero_error_runs_the_cost_test(isomorphic: bool, monkeypatch) -> None:
    """
    The cost test runs once and its figures land on the record; the
    non-isomorphic verdict agrees with what the cost test said.
    """
    calls: List[int] = []
    cost_test = experiment._cost_test

    def counted(*args, **kwargs) -> DecisionRecord:
        calls.append(1)
        return cost_test(*args, **kwargs)

    monkeypatch.setattr(experiment, "_cost_test", counted)
    instance, _ = rigid_pair(6, np.random.default_rng(1), isomorphic)
    record: DecisionRecord = decide_with_record(instance, DecisionMode.ZERO_ERROR, np.random.default_rng(2),
                                                t=1024, b=8)
    assert calls == [1]
    assert record.mode is DecisionMode.ZERO_ERROR
    assert record.theta == pytest.approx(1024 * (LOG2_S6 + 0.5))
    assert record.cost is not None and record.winner is not None
    if isomorphic:
        assert record.verdict is Verdict.ISOMORPHIC and record.witness is not None
        assert record.reduced is Verdict.ISOMORPHIC
    else:
        assert record.reduced is Verdict.NON_ISOMORPHIC
        assert record.verdict is Verdict.NON_ISOMORPHIC and record.witness is None


# Tests that the cost test alone certifies non-isomorphism.
def test_zero_error_trusts_the_cost_test_without_a_complete_search() -> None:
    """
    With a one-element search nothing is complete, so a non-isomorphic
    answer can only come from the cost test.
    """
    instance, _ = rigid_pair(6, np.random.default_rng(3), isomorphic=False)
    record: DecisionRecord = decide_with_record(instance, DecisionMode.ZERO_ERROR, np.random.default_rng(4),
                                                budget=1, t=1024, b=8)
    assert record.reduced is Verdict.NON_ISOMORPHIC
    assert record.verdict is Verdict.NON_ISOMORPHIC
    assert record.cost > record.theta


# Tests decisions with a search budget too small to be complete.
@pytest.mark.parametrize('seed', range(4))
def test_small_budget_never_claims_isomorphism_wrongly(seed: int) -> None:
    """
    For non-isomorphic pairs a one-element search finds nothing: the
    witness deciders say unknown or non-isomorphic, never isomorphic.
    """
    rng: np.random.Generator = np.random.default_rng(500 + seed)
    instance, _ = rigid_pair(6, rng, isomorphic=False)
    assert decide(instance, DecisionMode.NO_FALSE_POSITIVES, 1, rng) is Verdict.UNKNOWN
    assert decide(instance, DecisionMode.ZERO_ERROR, 1, rng, t=256) in (Verdict.NON_ISOMORPHIC, Verdict.UNKNOWN)


# Tests decisions on the other kinds.
def test_decide_other_kinds() -> None:
    """
    A code and a conjugate subgroup list are recognised through a witness.
    """
    rng: np.random.Generator = np.random.default_rng(9)
    for kind in (CodeKind(4, 2, 3), ConjugacyKind(4)):
        w = random_object(kind, rng)
        copy, _ = relabel(kind, w, rng)
        assert decide(IsoInstance(kind, w, copy), DecisionMode.ZERO_ERROR, None, rng, t=16) is Verdict.ISOMORPHIC
