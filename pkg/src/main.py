"""
Command-line entry point.

    python src/main.py <verb> [options]

Verbs:
- rank, unrank, canonical, normal-form, gl-rank, gl-unrank, gl-order, rref
- encode, decode, cost
- reduce, decide, experiment

Indices are 0-based unless --one-based is given. Randomized verbs
(encode, reduce, decide, and decode without --scheme) need --seed; the same
argv and seed always print the same bytes. Logs go to stderr.

Formats:
- permutation: images of 1..n on one line, e.g. "3 1 2"
- generator list: "n k", then k permutation lines
- matrix: "rows cols q", then one line of residues per row
- object file: a kind line (graph, code, conjugacy, matrix-space), then its payload
- instance file: a kind line, then two payloads separated by a blank line
- experiment config: key=value lines (instances, random_pairs, n, pair_seed,
  t, b, seeds, mode, sampler, c_machine, witness_budget)

Exit codes: 0 success, 1 usage/config/input error, 2 invariant violation.
"""

import argparse
import sys
from typing import Callable, Dict, List, Optional, TextIO

from libs.interfaces.errors import AuditFailure, InvariantViolation, ReductionError, UsageError
from libs.utils.configs import Settings, loadsConfig
from libs.utils.pylog import Logger, configure
from surfaces import (
    CODEC_VERBS, ENCODING_VERBS, REDUCTION_VERBS, CodecsSurface, EncodingSurface, ReductionSurface,
    register_codecs, register_encoding, register_reduction,
)
from surfaces.common import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION

logger = Logger(__name__)

Surface = Callable[[argparse.Namespace, TextIO], int]

SURFACES: Dict[str, Surface] = {}
SURFACES.update({verb: CodecsSurface for verb in CODEC_VERBS})
SURFACES.update({verb: EncodingSurface for verb in ENCODING_VERBS})
SURFACES.update({verb: ReductionSurface for verb in REDUCTION_VERBS})


# Defines an ArgumentParser that raises instead of exiting.
class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser: argparse.ArgumentParser = _Parser(
        prog="main.py",
        description=__doc__.split("\n\n")[0].strip(),
        epilog="\n\n".join(__doc__.split("\n\n")[1:]),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="verb", metavar="verb", required=True)
    register_codecs(subparsers)
    register_encoding(subparsers)
    register_reduction(subparsers)

    # Shared flags are accepted after any verb.
    for sub in subparsers.choices.values():
        sub.add_argument("--seed", type=int, help="seed for randomized verbs")
        sub.add_argument("--config", help="settings file (default: data/config.json)")
        sub.add_argument("--verbose", action="store_true", help="log at DEBUG level")
        sub.add_argument("--one-based", action="store_true", help="read and print indices starting at 1")
    return parser


def dispatch(argv: List[str], out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """
    Parses argv, runs the verb and maps errors to exit codes.

    Args:
        argv: Arguments without the program name.
        out: Where command output goes (default: stdout).
        err: Where error messages go (default: stderr).

    Returns:
        The exit code.
    """
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        args: argparse.Namespace = build_parser().parse_args(argv)
        settings: Settings = loadsConfig(args.config)
        configure("DEBUG" if args.verbose else settings.logging.level)
        args.settings = settings
        return SURFACES[args.verb](args, out)
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else EXIT_OK
    except (InvariantViolation, AuditFailure) as e:
        logger.error(f"Invariant violated: {e}")
        err.write(f"error: {e}\n")
        return EXIT_VIOLATION
    except ReductionError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    except OSError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(dispatch(sys.argv[1:]))
