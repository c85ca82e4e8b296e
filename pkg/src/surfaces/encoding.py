"""
Encoding verbs: flat-scheme encode/decode for the orbit sampler of an
object, and description costs.

The hints file read by `cost` holds one description per line:
"codec_id params index", with params as a bit string ("-" for empty).
"""

import argparse
from typing import List, Optional, TextIO

import numpy as np

from libs.encoding.cost_oracle import AuditCertificate, CostReport, Description, counting_audit, explain
from libs.encoding.flat_encoder import BitProgram, FlatScheme, build_scheme, decode, encode, orbit_program
from libs.harness.estimators import log_orbit_overestimate
from libs.harness.reduction import ReductionContext
from libs.interfaces.errors import UsageError
from libs.interfaces.typing import Bits, is_bits
from libs.iso.formats import parse_object_file
from libs.iso.framework import Kind, UniverseElement
from libs.utils.pylog import Logger

from .common import from_user_index, read_text, rng_from_seed, to_user_index

logger = Logger(__name__)

VERBS = ("encode", "decode", "cost")


def _build(args: argparse.Namespace, ctx: ReductionContext, kind: Kind, w: UniverseElement,
           program: BitProgram) -> FlatScheme:
    rng: np.random.Generator = rng_from_seed(args)
    s: float = args.s if args.s is not None else log_orbit_overestimate(kind, w, ctx, rng).value + 1
    cfg = ctx.settings.flat_encoder
    return build_scheme(program, s, rng, cfg.retry_budget, cfg.exhaustive_ell, cfg.sample_checks)


def _read_hints(path: Optional[str]) -> List[Description]:
    if path is None:
        return []
    hints: List[Description] = []
    for number, line in enumerate(read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        parts: List[str] = line.split()
        if len(parts) != 3 or not parts[2].isdigit():
            raise UsageError(f"{path}:{number}: expected 'codec_id params index'")
        params: Bits = "" if parts[1] == "-" else parts[1]
        if not is_bits(params):
            raise UsageError(f"{path}:{number}: params must be a bit string")
        hints.append(Description(parts[0], params, int(parts[2])))
    return hints


# Registers the encoding verbs on the CLI.
def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("encode", help="flat-scheme index of a copy of an object (randomized)")
    p.add_argument("object", help="single-object file: kind line, then the payload")
    p.add_argument("--outcome", help="canonical string to encode (default: the object's own)")
    p.add_argument("--s", type=float, help="max-entropy bound (default: orbit estimate + 1)")
    p.add_argument("--scheme-out", help="write the built scheme to this file")

    p = subparsers.add_parser("decode", help="canonical string named by a flat-scheme index")
    p.add_argument("object")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--scheme", help="scheme file written by encode; without it the scheme is rebuilt from --seed")
    p.add_argument("--s", type=float)

    p = subparsers.add_parser("cost", help="description cost of a bit string")
    p.add_argument("bits", help="the string, or '-' for stdin")
    p.add_argument("--hints", help="file of descriptions, one 'codec_id params index' per line")
    p.add_argument("--audit", type=int, metavar="C", help="also run the counting audit at cost bound C")


# Defines the encoding surface.
def surface(args: argparse.Namespace, out: TextIO) -> int:
    ctx: ReductionContext = ReductionContext.from_settings(args.settings)
    verb: str = args.verb

    if verb == "encode":
        kind, w = parse_object_file(read_text(args.object))
        program: BitProgram = orbit_program(kind, w)
        scheme: FlatScheme = _build(args, ctx, kind, w, program)
        outcome: Bits = args.outcome if args.outcome is not None else kind.invariant(w)
        out.write(f"{to_user_index(encode(scheme, outcome), args)}\n")
        if args.scheme_out:
            with open(args.scheme_out, "w", encoding="utf-8") as f:
                f.write(scheme.serialize())

    elif verb == "decode":
        kind, w = parse_object_file(read_text(args.object))
        program = orbit_program(kind, w)
        if args.scheme is not None:
            scheme = FlatScheme.parse(read_text(args.scheme), program)
            if scheme.ell != program.ell:
                raise UsageError(f"the scheme reads {scheme.ell} bits, the sampler takes {program.ell}")
        else:
            scheme = _build(args, ctx, kind, w, program)
        out.write(decode(scheme, from_user_index(args.index, args)) + "\n")

    elif verb == "cost":
        y: Bits = read_text("-").strip() if args.bits == "-" else args.bits
        if not is_bits(y):
            raise UsageError("the string to cost must consist of 0 and 1")
        report: CostReport = explain(ctx.model, y, _read_hints(args.hints))
        out.write(report.line() + "\n")
        if args.audit is not None:
            cert: AuditCertificate = counting_audit(ctx.model, args.audit, len(y))
            for codec_id, bound in sorted(cert.per_codec.items()):
                out.write(f"audit {codec_id} {bound}\n")
            out.write(f"audit total {cert.total_bound} < {cert.limit}\n")

    else:
        raise UsageError(f"'{verb}' is not an encoding verb")
    return 0
