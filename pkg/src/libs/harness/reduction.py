"""
The reduction from an isomorphism instance to a description-cost question.

reduce() draws t samples y_i = invariant(h_i(x_{r_i})) with fresh random
r_i in {0, 1} and h_i in H, and sets the threshold theta = t(s + 1/2).
When x0 and x1 are isomorphic every sample is a copy of x0, so the t
samples can be described in about t*s bits; when they are not, y carries
about t more bits of information (the choices r_i) and cannot be cheap.
The hint builders below produce the descriptions that realize the first
case for the cost model.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from libs.encoding.cost_oracle import CostModel, Description
from libs.encoding.flat_encoder import FlatScheme, build_scheme, orbit_program
from libs.groups.group_engine import ErdosRenyiSampler
from libs.groups.perm_core import Permutation
from libs.interfaces.errors import DomainError, HintFailure, ReductionError
from libs.interfaces.typing import Bits
from libs.iso.codecs import OrbitCodecs, build_cost_model, coset_hint, element_hint, flat_hint
from libs.iso.framework import GroupElement, IsoInstance, Kind, OrbitTable, UniverseElement
from libs.utils.configs import Settings
from libs.utils.pylog import Logger

logger = Logger(__name__)

UNIFORM: str = "uniform"
ERDOS_RENYI: str = "erdos-renyi"
SAMPLERS: Tuple[str, ...] = (UNIFORM, ERDOS_RENYI)


@dataclass
class ReductionContext:
    """Settings plus the cost model and the orbit codecs registered in it."""
    settings: Settings
    model: CostModel
    codecs: OrbitCodecs

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "ReductionContext":
        settings = settings if settings is not None else Settings()
        model, codecs = build_cost_model(settings)
        return cls(settings, model, codecs)

    # Whether coset indexing over the permutation representation of H is affordable.
    def coset_capable(self, kind: Kind) -> bool:
        return kind.perm_degree() <= self.settings.groups.perm_rep_cap

    def orbit_table(self, kind: Kind, w: UniverseElement) -> Optional[OrbitTable]:
        """The exhaustive inverter for w, or None when |H| is past the closure cap."""
        if kind.group_order() > self.settings.groups.closure_cap:
            return None
        return OrbitTable(kind, w, self.settings.groups.closure_cap)


# Returns ceil(sqrt(t)), the default block size.
def default_block(t: int) -> int:
    b: int = math.isqrt(t)
    return b if b * b == t else b + 1


@dataclass(frozen=True)
class Transcript:
    """Everything reduce() drew: the seed it was given, every r_i and every h_i."""
    seed: Optional[int]
    choices: Tuple[int, ...]
    elements: Tuple[GroupElement, ...]
    sampler: str = UNIFORM


@dataclass(frozen=True)
class ReductionOutput:
    y: Bits
    theta: float
    t: int
    b: int
    s_tilde: float
    sample_length: int
    transcript: Transcript = field(repr=False)

    @property
    def samples(self) -> List[Bits]:
        w: int = self.sample_length
        return [self.y[i * w:(i + 1) * w] for i in range(self.t)]


def reduce(instance: IsoInstance, t: int, s_tilde: float, rng: np.random.Generator, b: Optional[int] = None,
           sampler: str = UNIFORM, seed: Optional[int] = None) -> ReductionOutput:
    """
    Draws the t samples and fixes the threshold.

    Args:
        instance: The pair (x0, x1).
        t: Number of samples.
        s_tilde: The entropy estimate used for the threshold.
        rng: Source of r_i and h_i.
        b: Block size for the hints; defaults to ceil(sqrt(t)).
        sampler: "uniform" (exact, from the stabilizer chain or GL rejection) or
            "erdos-renyi" (random subproducts over the permutation representation).
        seed: Recorded in the transcript only.

    Raises:
        DomainError: If t < 1, s_tilde < 0 or the sampler is unknown.
    """
    if t < 1 or s_tilde < 0:
        raise DomainError(f"need t >= 1 and s_tilde >= 0, got t={t}, s_tilde={s_tilde}")
    if sampler not in SAMPLERS:
        raise DomainError(f"unknown sampler '{sampler}'\n|- expected one of {', '.join(SAMPLERS)}")
    kind: Kind = instance.kind
    block: int = b if b is not None else default_block(t)

    draw = kind.random_element
    if sampler == ERDOS_RENYI:
        er: ErdosRenyiSampler = ErdosRenyiSampler(kind.group_as_perm(), rng)
        draw = lambda g: kind.from_permutation(er.draw(g))  # noqa: E731

    choices: List[int] = []
    elements: List[GroupElement] = []
    parts: List[Bits] = []
    for _ in range(t):
        r: int = int(rng.integers(0, 2))
        h: GroupElement = draw(rng)
        choices.append(r)
        elements.append(h)
        parts.append(kind.invariant(kind.act(h, instance.side(r))))

    transcript: Transcript = Transcript(seed, tuple(choices), tuple(elements), sampler)
    return ReductionOutput("".join(parts), t * (s_tilde + 0.5), t, block, s_tilde,
                           kind.invariant_length(), transcript)


# Maps every sample into the orbit of x0: returns tau_i with invariant(act(tau_i, x0)) == y_i.
def _taus_for_base(output: ReductionOutput, instance: IsoInstance, witness: Optional[GroupElement],
                   table: Optional[OrbitTable]) -> List[GroupElement]:
    kind: Kind = instance.kind
    taus: List[GroupElement] = []
    for i, (r, h, y) in enumerate(zip(output.transcript.choices, output.transcript.elements, output.samples)):
        tau: Optional[GroupElement] = None
        if r == 0:
            tau = h
        elif witness is not None:
            tau = kind.compose(witness, h)
        elif table is not None:
            tau = table.lookup(y)
        if tau is None:
            raise HintFailure(f"sample {i} is not in the orbit of the base object")
        taus.append(tau)
    return taus


def hint_for_isomorphic(output: ReductionOutput, instance: IsoInstance, ctx: ReductionContext,
                        witness: Optional[GroupElement] = None, b: Optional[int] = None,
                        aut: Sequence[Permutation] = (), table: Optional[OrbitTable] = None,
                        s_bound: Optional[float] = None,
                        rng: Optional[np.random.Generator] = None) -> List[Description]:
    """
    Descriptions of y built on the base x0, one per applicable codec.

    Every sample is mapped into the orbit of x0, either through the witness
    (an element sending x0 to x1) or by inversion through an orbit table.
    The element codec is always offered. The coset codec, using the
    automorphism generators `aut` as Gamma, is offered when the permutation
    representation of H is affordable; otherwise a flat scheme for the orbit
    sampler of x0 stands in for it, built with entropy bound s_bound + 1 and
    hashes drawn from rng.

    Raises:
        HintFailure: If a sample cannot be mapped to the orbit of x0.
    """
    kind: Kind = instance.kind
    block: int = b if b is not None else output.b
    taus: List[GroupElement] = _taus_for_base(output, instance, witness, table)
    for tau, y in zip(taus, output.samples):
        if kind.invariant(kind.act(tau, instance.x0)) != y:
            raise HintFailure("the witness does not send x0 to x1")

    hints: List[Description] = [element_hint(ctx.codecs.element(kind), kind, instance.x0, taus, block)]
    if ctx.coset_capable(kind):
        hints.append(coset_hint(ctx.codecs.coset, kind, [instance.x0], [list(aut)],
                                [(0, tau) for tau in taus], block))
    else:
        s: float = s_bound if s_bound is not None else math.log2(kind.group_order())
        try:
            scheme: FlatScheme = build_scheme(
                orbit_program(kind, instance.x0), s + 1, rng if rng is not None else np.random.default_rng(0),
                retry_budget=ctx.settings.flat_encoder.retry_budget,
                exhaustive_ell=ctx.settings.flat_encoder.exhaustive_ell,
                sample_checks=ctx.settings.flat_encoder.sample_checks,
            )
            hints.append(flat_hint(ctx.codecs.flat, kind, instance.x0, scheme, output.samples, block))
        except ReductionError as e:
            logger.info(f"Flat-scheme hint unavailable: {e}")
    return hints


def mixture_hint(output: ReductionOutput, instance: IsoInstance, ctx: ReductionContext,
                 aut0: Sequence[Permutation] = (), aut1: Sequence[Permutation] = (),
                 b: Optional[int] = None) -> Optional[Description]:
    """
    The two-base coset description of y read straight off the transcript:
    sample i is h_i applied to x_{r_i}. Needs no witness, and costs about
    one bit per sample more than a single orbit. None when coset indexing
    is out of reach.
    """
    kind: Kind = instance.kind
    if not ctx.coset_capable(kind):
        return None
    samples: List[Tuple[int, GroupElement]] = list(zip(output.transcript.choices, output.transcript.elements))
    return coset_hint(ctx.codecs.coset, kind, [instance.x0, instance.x1], [list(aut0), list(aut1)], samples,
                      b if b is not None else output.b)
