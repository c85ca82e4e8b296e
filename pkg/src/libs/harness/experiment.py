"""
Decisions and experiment sweeps.

decide() assembles the reduction into one of three deciders:

    no-false-negatives   reduce, then compare the cost of y with theta.
                         An isomorphic pair always gets a description under
                         theta, so it is never declared non-isomorphic.
    no-false-positives   search for a witness and verify it; complete search
                         (|H| within budget) certifies non-isomorphism too.
    zero-error           run the cost test for the non-isomorphic side and the
                         witness search for the isomorphic side; a complete
                         search settles what neither certifies, otherwise
                         unknown.
"""

import csv
import enum
import math
import os
from dataclasses import dataclass, replace
from typing import Dict, IO, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from libs.encoding.cost_oracle import CostReport, Description, explain
from libs.interfaces.errors import ConfigError, HintFailure, ReductionError
from libs.iso.formats import parse_instance
from libs.iso.framework import GroupElement, IsoInstance, Kind, OrbitTable
from libs.utils.configs import Settings
from libs.utils.pylog import Logger

from .estimators import EXHAUSTIVE, SAMPLING, EstimatorReport, log_orbit_overestimate
from .instances import mixed_pairs
from .reduction import (
    ERDOS_RENYI, UNIFORM, ReductionContext, ReductionOutput, default_block, hint_for_isomorphic, mixture_hint,
    reduce,
)

logger = Logger(__name__)


class Verdict(enum.Enum):
    ISOMORPHIC = "isomorphic"
    NON_ISOMORPHIC = "non-isomorphic"
    UNKNOWN = "unknown"


class DecisionMode(enum.Enum):
    NO_FALSE_NEGATIVES = "no-false-negatives"
    NO_FALSE_POSITIVES = "no-false-positives"
    ZERO_ERROR = "zero-error"


@dataclass(frozen=True)
class DecisionRecord:
    verdict: Verdict
    mode: DecisionMode
    t: Optional[int] = None
    b: Optional[int] = None
    s_tilde: Optional[float] = None
    theta: Optional[float] = None
    cost: Optional[int] = None
    winner: Optional[str] = None
    witness: Optional[GroupElement] = None
    # What the cost test alone said; None when it did not run.
    reduced: Optional[Verdict] = None


# --- Witness search ---

def _witness_search(instance: IsoInstance, budget: int, rng: np.random.Generator,
                    table: Optional[OrbitTable]) -> Tuple[Optional[GroupElement], bool]:
    """
    Returns (witness, complete). The search is complete when every element of
    H was tried; a sampled search tries `budget` random elements.
    """
    kind: Kind = instance.kind
    target: str = kind.invariant(instance.x1)
    if table is None and kind.group_order() <= budget:
        table = OrbitTable(kind, instance.x0, budget)
    if table is not None:
        return table.lookup(target), True
    for _ in range(budget):
        h: GroupElement = kind.random_element(rng)
        if kind.invariant(kind.act(h, instance.x0)) == target:
            return h, False
    return None, False


def _verified(instance: IsoInstance, h: GroupElement) -> bool:
    kind: Kind = instance.kind
    return kind.invariant(kind.act(h, instance.x0)) == kind.invariant(instance.x1)


# --- Cost test ---

def _cost_test(instance: IsoInstance, ctx: ReductionContext, rng: np.random.Generator, t: int,
               b: Optional[int], sampler: str, seed: Optional[int]) -> DecisionRecord:
    kind: Kind = instance.kind
    tables: List[Optional[OrbitTable]] = [ctx.orbit_table(kind, instance.x0), ctx.orbit_table(kind, instance.x1)]
    strategy: str = EXHAUSTIVE if tables[0] is not None else SAMPLING
    reports: List[EstimatorReport] = [
        log_orbit_overestimate(kind, instance.side(j), ctx, rng, strategy, tables[j]) for j in (0, 1)
    ]
    j: int = 0 if reports[0].value <= reports[1].value else 1
    s_tilde: float = reports[j].value

    output: ReductionOutput = reduce(instance, t, s_tilde, rng, b, sampler, seed)
    hints: List[Description] = []
    mixture: Optional[Description] = mixture_hint(output, instance, ctx, reports[0].generators, reports[1].generators)
    if mixture is not None:
        hints.append(mixture)

    # Hints on the cheaper side: swap the pair so that side is x0.
    based: IsoInstance = instance if j == 0 else IsoInstance(kind, instance.x1, instance.x0)
    if j == 1:
        output = replace(output, transcript=replace(output.transcript,
                                                    choices=tuple(1 - r for r in output.transcript.choices)))
    try:
        hints.extend(hint_for_isomorphic(output, based, ctx, aut=reports[j].generators, table=tables[j],
                                         s_bound=s_tilde, rng=rng))
    except HintFailure as e:
        logger.info(f"No single-orbit hint: {e}")

    report: CostReport = explain(ctx.model, output.y, hints)
    isomorphic: bool = report.total <= output.theta
    verdict: Verdict = Verdict.ISOMORPHIC if isomorphic else Verdict.NON_ISOMORPHIC
    if not isomorphic and tables[j] is None:
        # Without an inverter an isomorphic pair can miss its cheap description.
        verdict = Verdict.UNKNOWN
    return DecisionRecord(verdict, DecisionMode.NO_FALSE_NEGATIVES, t, output.b, s_tilde, output.theta,
                          report.total, report.codec_id, reduced=verdict)


def decide_with_record(instance: IsoInstance, mode: DecisionMode, rng: np.random.Generator,
                       ctx: Optional[ReductionContext] = None, budget: Optional[int] = None,
                       t: Optional[int] = None, b: Optional[int] = None, sampler: str = UNIFORM,
                       seed: Optional[int] = None) -> DecisionRecord:
    """
    Decides whether x0 and x1 are isomorphic.

    Args:
        instance: The pair.
        mode: Which one-sided guarantee to keep.
        rng: Source of all randomness.
        ctx: Settings, cost model and codecs; defaults apply when missing.
        budget: Witness-search budget (number of group elements); defaults to
            harness.witness_budget.
        t: Number of samples for the cost test; defaults to harness.t.
        b: Block size; defaults to harness.block, then ceil(sqrt(t)).
        sampler: Group sampler for the reduction.
        seed: Recorded in the reduction transcript.

    Returns:
        The verdict with the figures behind it.
    """
    ctx = ctx if ctx is not None else ReductionContext.from_settings()
    budget = budget if budget is not None else ctx.settings.harness.witness_budget
    t = t if t is not None else ctx.settings.harness.t
    b = b if b is not None else ctx.settings.harness.block

    if mode is DecisionMode.NO_FALSE_NEGATIVES:
        return _cost_test(instance, ctx, rng, t, b, sampler, seed)

    if mode is DecisionMode.NO_FALSE_POSITIVES:
        witness, complete = _witness_search(instance, budget, rng, None)
        if witness is not None and _verified(instance, witness):
            return DecisionRecord(Verdict.ISOMORPHIC, mode, witness=witness)
        return DecisionRecord(Verdict.NON_ISOMORPHIC if complete else Verdict.UNKNOWN, mode)

    # Zero error: the cost test speaks for non-isomorphism, a verified witness
    # for isomorphism. A complete search overrides both.
    record: DecisionRecord = _cost_test(instance, ctx, rng, t, b, sampler, seed)
    witness, complete = _witness_search(instance, budget, rng, None)
    verdict: Verdict = Verdict.UNKNOWN
    if witness is not None and _verified(instance, witness):
        verdict = Verdict.ISOMORPHIC
        if record.reduced is Verdict.NON_ISOMORPHIC:
            logger.warning(f"Cost test rejected an isomorphic pair\n|- t={record.t} b={record.b} "
                           f"cost={record.cost} theta={record.theta:.3f}")
    elif record.reduced is Verdict.NON_ISOMORPHIC or complete:
        verdict = Verdict.NON_ISOMORPHIC
    return replace(record, verdict=verdict, mode=mode, witness=witness if verdict is Verdict.ISOMORPHIC else None)


def decide(instance: IsoInstance, mode: DecisionMode, budget: Optional[int], rng: np.random.Generator,
           ctx: Optional[ReductionContext] = None, **kwargs) -> Verdict:
    return decide_with_record(instance, mode, rng, ctx, budget, **kwargs).verdict


# --- Experiment configuration ---

class ExperimentConfig(BaseModel):
    """A sweep: instances x t values x block sizes x seeds."""
    instances: List[str] = Field(default_factory=list)
    random_pairs: int = Field(0, ge=0)
    n: int = Field(6, ge=1, le=8)
    pair_seed: int = Field(0, ge=0)
    t: List[int] = Field(default_factory=lambda: [1024])
    # None means ceil(sqrt(t)).
    b: List[Optional[int]] = Field(default_factory=lambda: [None])
    seeds: List[int] = Field(default_factory=lambda: [0])
    mode: DecisionMode = DecisionMode.NO_FALSE_NEGATIVES
    sampler: str = UNIFORM
    c_machine: Optional[int] = Field(None, ge=0)
    witness_budget: Optional[int] = Field(None, ge=1)

    @field_validator("t")
    @classmethod
    def _positive_t(cls, values: List[int]) -> List[int]:
        if not values or any(v < 1 for v in values):
            raise ValueError("t values must be positive")
        return values

    @field_validator("b")
    @classmethod
    def _positive_b(cls, values: List[Optional[int]]) -> List[Optional[int]]:
        if not values or any(v is not None and v < 1 for v in values):
            raise ValueError("block sizes must be positive or 'auto'")
        return values

    @field_validator("sampler")
    @classmethod
    def _known_sampler(cls, value: str) -> str:
        if value not in (UNIFORM, ERDOS_RENYI):
            raise ValueError(f"unknown sampler {value!r}")
        return value


_LIST_KEYS: Tuple[str, ...] = ("instances", "t", "b", "seeds")


def _split(value: str) -> List[Optional[str]]:
    return [None if tok.strip() == "auto" else tok.strip() for tok in value.split(",") if tok.strip()]


def parse_experiment_config(text: str) -> ExperimentConfig:
    """
    Reads a key=value experiment file. Blank lines and lines starting with
    '#' are skipped; list values are comma-separated; a block size of
    "auto" means ceil(sqrt(t)).

    Raises:
        ConfigError: With the offending line number, on a malformed line, an
            unknown or repeated key, or a value of the wrong shape.
    """
    raw: Dict[str, object] = {}
    lines: Dict[str, int] = {}
    known = ExperimentConfig.model_fields
    for number, line in enumerate(text.splitlines(), start=1):
        stripped: str = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected key=value\n|- {stripped!r}", number)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in known:
            raise ConfigError(f"unknown key '{key}'", number)
        if key in raw:
            raise ConfigError(f"key '{key}' is set twice (first on line {lines[key]})", number)
        raw[key] = _split(value) if key in _LIST_KEYS else value
        lines[key] = number

    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        key: str = str(first["loc"][0]) if first["loc"] else ""
        raise ConfigError(f"invalid value for '{key}'\n|- {first['msg']}", lines.get(key))


# --- Sweeps ---

CSV_COLUMNS: Tuple[str, ...] = ("instance", "truth", "t", "b", "s_tilde", "theta", "cost", "verdict", "seed")


@dataclass(frozen=True)
class ExperimentRow:
    instance: str
    truth: str
    t: int
    b: int
    s_tilde: Optional[float]
    theta: Optional[float]
    cost: Optional[int]
    verdict: str
    seed: int

    def cells(self) -> List[str]:
        def num(v: Optional[float]) -> str:
            return "" if v is None else f"{v:.6f}"
        return [self.instance, self.truth, str(self.t), str(self.b), num(self.s_tilde), num(self.theta),
                "" if self.cost is None else str(self.cost), self.verdict, str(self.seed)]


@dataclass(frozen=True)
class ExperimentResult:
    rows: Tuple[ExperimentRow, ...]
    violations: Tuple[str, ...]


def ground_truth(instance: IsoInstance, cap: int) -> str:
    """"isomorphic" / "non-isomorphic" by orbit table, "unknown" past the cap."""
    kind: Kind = instance.kind
    if kind.group_order() > cap:
        return "unknown"
    found: Optional[GroupElement] = OrbitTable(kind, instance.x0, cap).lookup(kind.invariant(instance.x1))
    return Verdict.ISOMORPHIC.value if found is not None else Verdict.NON_ISOMORPHIC.value


# Returns a message when a verdict breaks the guarantee of its mode.
def check_row(row: ExperimentRow, mode: DecisionMode) -> Optional[str]:
    if row.truth == "unknown" or row.verdict == Verdict.UNKNOWN.value or row.verdict == row.truth:
        return None
    return f"{row.instance} (t={row.t}, b={row.b}, seed={row.seed}): {mode.value} answered {row.verdict}, truth is {row.truth}"


def _load_instances(config: ExperimentConfig, base_dir: str) -> List[Tuple[str, IsoInstance]]:
    named: List[Tuple[str, IsoInstance]] = []
    for path in config.instances:
        full: str = path if os.path.isabs(path) else os.path.join(base_dir, path)
        try:
            with open(full, "r", encoding="utf-8") as f:
                named.append((os.path.basename(path), parse_instance(f.read())))
        except OSError as e:
            raise ConfigError(f"cannot read instance file {full}\n|- {e}")
        except ReductionError as e:
            raise ConfigError(f"malformed instance file {full}\n|- {e}")
    if config.random_pairs:
        rng: np.random.Generator = np.random.default_rng(np.random.SeedSequence([config.pair_seed]))
        for i, (instance, _) in enumerate(mixed_pairs(config.random_pairs, config.n, rng)):
            named.append((f"random-{i}", instance))
    if not named:
        raise ConfigError("the experiment lists no instances")
    return named


def run_experiment(config: ExperimentConfig, settings: Optional[Settings] = None,
                   base_dir: str = ".") -> ExperimentResult:
    """
    Runs decide on every (instance, t, b, seed) combination.

    Each trial draws from its own generator seeded by
    SeedSequence([seed, instance index, t, b]), so rows are reproducible one
    by one and independent of the sweep order.
    """
    settings = settings if settings is not None else Settings()
    overrides: Dict[str, object] = {}
    if config.c_machine is not None:
        overrides["cost_model"] = settings.cost_model.model_copy(update={"c_machine": config.c_machine})
    if config.witness_budget is not None:
        overrides["harness"] = settings.harness.model_copy(update={"witness_budget": config.witness_budget})
    ctx: ReductionContext = ReductionContext.from_settings(settings.model_copy(update=overrides))

    rows: List[ExperimentRow] = []
    violations: List[str] = []
    for index, (name, instance) in enumerate(_load_instances(config, base_dir)):
        truth: str = ground_truth(instance, ctx.settings.groups.closure_cap)
        for t in config.t:
            for b_opt in config.b:
                b: int = b_opt if b_opt is not None else default_block(t)
                for seed in config.seeds:
                    rng: np.random.Generator = np.random.default_rng(np.random.SeedSequence([seed, index, t, b]))
                    record: DecisionRecord = decide_with_record(instance, config.mode, rng, ctx, t=t, b=b,
                                                                sampler=config.sampler, seed=seed)
                    row: ExperimentRow = ExperimentRow(name, truth, t, b, record.s_tilde, record.theta,
                                                       record.cost, record.verdict.value, seed)
                    rows.append(row)
                    problem: Optional[str] = check_row(row, config.mode)
                    if problem is not None:
                        logger.error(f"Guarantee violated: {problem}")
                        violations.append(problem)
    return ExperimentResult(tuple(rows), tuple(violations))


def write_csv(rows: Sequence[ExperimentRow], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.cells())


def accuracy(rows: Sequence[ExperimentRow]) -> float:
    """Share of rows with a known truth whose verdict matches it."""
    scored: List[ExperimentRow] = [r for r in rows if r.truth != "unknown"]
    if not scored:
        return math.nan
    return sum(r.verdict == r.truth for r in scored) / len(scored)
