import argparse
import sys

import numpy as np

from libs.interfaces.errors import UsageError

# --- Exit codes ---
EXIT_OK: int = 0
EXIT_USAGE: int = 1
# A sweep broke a guarantee.
EXIT_VIOLATION: int = 2


# Reads a whole file, or stdin for '-'.
def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}\n|- {e.strerror}")


def to_user_index(index: int, args: argparse.Namespace) -> int:
    return index + 1 if args.one_based else index


def from_user_index(index: int, args: argparse.Namespace) -> int:
    value: int = index - 1 if args.one_based else index
    if value < 0:
        raise UsageError(f"index {index} is below the first index ({1 if args.one_based else 0})")
    return value


# Returns the generator behind every randomized verb.
def rng_from_seed(args: argparse.Namespace) -> np.random.Generator:
    """
    Raises:
        UsageError: If --seed was not given.
    """
    if args.seed is None:
        raise UsageError(f"'{args.verb}' is randomized and needs --seed")
    if args.seed < 0:
        raise UsageError(f"--seed must be nonnegative, got {args.seed}")
    return np.random.default_rng(np.random.SeedSequence(args.seed))
