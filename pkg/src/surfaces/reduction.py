"""
Reduction verbs: reduce an instance, decide it, or run an experiment sweep.
"""

import argparse
import os
from typing import List, Optional, TextIO

import numpy as np

from libs.encoding.cost_oracle import CostReport, Description, explain
from libs.harness.estimators import EstimatorReport, log_orbit_overestimate
from libs.harness.experiment import (
    DecisionMode, DecisionRecord, ExperimentResult, decide_with_record, parse_experiment_config, run_experiment,
    write_csv,
)
from libs.harness.reduction import (
    SAMPLERS, UNIFORM, ReductionContext, ReductionOutput, hint_for_isomorphic, mixture_hint, reduce,
)
from libs.interfaces.errors import HintFailure, UsageError
from libs.iso.formats import parse_instance
from libs.iso.framework import IsoInstance, OrbitTable
from libs.utils.pylog import Logger

from .common import EXIT_VIOLATION, read_text, rng_from_seed

logger = Logger(__name__)

VERBS = ("reduce", "decide", "experiment")


def _add_sampling_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t", type=int, help="number of samples (default: harness.t)")
    p.add_argument("--b", type=int, help="block size (default: harness.block, then ceil(sqrt(t)))")
    p.add_argument("--sampler", choices=SAMPLERS, default=UNIFORM)


# Registers the reduction verbs on the CLI.
def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("reduce", help="draw the reduction output y and its threshold (randomized)")
    p.add_argument("instance", help="instance file")
    p.add_argument("--s", type=float, help="entropy estimate (default: orbit overestimate of x0)")
    p.add_argument("--explain", action="store_true", help="also print the cheapest hinted description of y")
    _add_sampling_args(p)

    p = subparsers.add_parser("decide", help="decide an instance (randomized)")
    p.add_argument("instance")
    p.add_argument("--mode", choices=[m.value for m in DecisionMode], default=DecisionMode.ZERO_ERROR.value)
    p.add_argument("--budget", type=int, help="witness-search budget (default: harness.witness_budget)")
    p.add_argument("--details", action="store_true", help="print t, b, s_tilde, theta and cost under the verdict")
    _add_sampling_args(p)

    p = subparsers.add_parser("experiment", help="run a key=value sweep config and print CSV")
    p.add_argument("config")
    p.add_argument("--out", help="write the CSV here instead of stdout")


def _explain(output: ReductionOutput, instance: IsoInstance, ctx: ReductionContext, rng: np.random.Generator,
             estimate: EstimatorReport) -> CostReport:
    hints: List[Description] = []
    aut1 = log_orbit_overestimate(instance.kind, instance.x1, ctx, rng).generators
    mixture: Optional[Description] = mixture_hint(output, instance, ctx, estimate.generators, aut1)
    if mixture is not None:
        hints.append(mixture)
    table: Optional[OrbitTable] = ctx.orbit_table(instance.kind, instance.x0)
    try:
        hints.extend(hint_for_isomorphic(output, instance, ctx, aut=estimate.generators, table=table, rng=rng))
    except HintFailure as e:
        logger.info(f"No single-orbit hint: {e}")
    return explain(ctx.model, output.y, hints)


# Defines the reduction surface.
def surface(args: argparse.Namespace, out: TextIO) -> int:
    ctx: ReductionContext = ReductionContext.from_settings(args.settings)
    verb: str = args.verb

    if verb == "reduce":
        rng: np.random.Generator = rng_from_seed(args)
        instance: IsoInstance = parse_instance(read_text(args.instance))
        estimate: EstimatorReport = log_orbit_overestimate(instance.kind, instance.x0, ctx, rng)
        s: float = args.s if args.s is not None else estimate.value
        t: int = args.t if args.t is not None else ctx.settings.harness.t
        b: Optional[int] = args.b if args.b is not None else ctx.settings.harness.block
        output: ReductionOutput = reduce(instance, t, s, rng, b, args.sampler, args.seed)
        out.write(f"t={output.t} b={output.b} s_tilde={output.s_tilde:.6f} theta={output.theta:.6f}\n")
        out.write(output.y + "\n")
        if args.explain:
            out.write(_explain(output, instance, ctx, rng, estimate).line() + "\n")

    elif verb == "decide":
        rng = rng_from_seed(args)
        instance = parse_instance(read_text(args.instance))
        record: DecisionRecord = decide_with_record(
            instance, DecisionMode(args.mode), rng, ctx, args.budget, args.t, args.b, args.sampler, args.seed
        )
        out.write(record.verdict.value + "\n")
        if args.details and record.theta is not None:
            out.write(f"t={record.t} b={record.b} s_tilde={record.s_tilde:.6f} theta={record.theta:.6f} "
                      f"cost={record.cost} codec={record.winner}\n")

    elif verb == "experiment":
        config = parse_experiment_config(read_text(args.config))
        base_dir: str = os.path.dirname(os.path.abspath(args.config)) if args.config != "-" else "."
        result: ExperimentResult = run_experiment(config, ctx.settings, base_dir)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                write_csv(result.rows, f)
        else:
            write_csv(result.rows, out)
        if result.violations:
            return EXIT_VIOLATION

    else:
        raise UsageError(f"'{verb}' is not a reduction verb")
    return 0
