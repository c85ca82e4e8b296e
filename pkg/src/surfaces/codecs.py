"""
Codec verbs: permutation ranks, coset indices, canonical representatives,
normal forms and GL_n(F_q) ranks.
"""

import argparse
from typing import List, Optional, TextIO

from libs.fields import fq_linalg
from libs.fields.fq_linalg import MatrixFq
from libs.groups.coset_codec import CosetIndexing, canonical_rep, normal_form
from libs.groups.group_engine import PermGroup
from libs.groups.perm_core import (
    Permutation, format_generator_list, format_permutation, lehmer_rank, lehmer_unrank, parse_generator_list,
    parse_permutation,
)
from libs.interfaces.errors import UsageError
from libs.utils.pylog import Logger

from .common import from_user_index, read_text, to_user_index

logger = Logger(__name__)

VERBS = ("rank", "unrank", "canonical", "normal-form", "gl-rank", "gl-unrank", "gl-order", "rref")


def _group_from_file(path: Optional[str], degree: int) -> Optional[PermGroup]:
    if path is None:
        return None
    n, gens = parse_generator_list(read_text(path))
    if n != degree:
        raise UsageError(f"{path} holds generators of degree {n}, expected {degree}")
    return PermGroup(n, gens)


# Registers the codec verbs on the CLI.
def register(subparsers: argparse._SubParsersAction) -> None:
    p = subparsers.add_parser("rank", help="Lehmer rank of a permutation, or its coset index with --gamma")
    p.add_argument("--perm", required=True, help='image list, e.g. "3 1 2"')
    p.add_argument("--gamma", help="generator-list file for the subgroup Gamma")
    p.add_argument("--group", help="generator-list file for H (default: S_n)")

    p = subparsers.add_parser("unrank", help="permutation of a Lehmer rank, or the coset representative with --gamma")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--gamma")
    p.add_argument("--group")

    p = subparsers.add_parser("canonical", help="lexicographically least element of the coset pi Gamma")
    p.add_argument("--perm", required=True)
    p.add_argument("--gamma", required=True)

    p = subparsers.add_parser("normal-form", help="normal form of a generator list")
    p.add_argument("file", help="generator-list file, '-' for stdin")

    p = subparsers.add_parser("gl-rank", help="rank of an invertible matrix in GL_n(F_q)")
    p.add_argument("file", help="matrix file, '-' for stdin")

    p = subparsers.add_parser("gl-unrank", help="invertible matrix of a rank")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = subparsers.add_parser("gl-order", help="order of GL_n(F_q)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = subparsers.add_parser("rref", help="reduced row echelon form of a matrix over F_q")
    p.add_argument("file", help="matrix file, '-' for stdin")


# Defines the codec surface.
def surface(args: argparse.Namespace, out: TextIO) -> int:
    """
    Runs one codec verb and writes its result to out.

    Returns:
        The exit code.
    """
    verb: str = args.verb
    if verb == "rank":
        pi: Permutation = parse_permutation(args.perm)
        gamma: Optional[PermGroup] = _group_from_file(args.gamma, pi.degree)
        if gamma is None:
            out.write(f"{to_user_index(lehmer_rank(pi), args)}\n")
        else:
            h: PermGroup = _group_from_file(args.group, pi.degree) or PermGroup.symmetric(pi.degree)
            out.write(f"{to_user_index(CosetIndexing(h, gamma).rank(pi), args)}\n")

    elif verb == "unrank":
        k: int = from_user_index(args.k, args)
        gamma = _group_from_file(args.gamma, args.n)
        if gamma is None:
            out.write(format_permutation(lehmer_unrank(k, args.n)) + "\n")
        else:
            h = _group_from_file(args.group, args.n) or PermGroup.symmetric(args.n)
            out.write(format_permutation(CosetIndexing(h, gamma).unrank(k)) + "\n")

    elif verb == "canonical":
        pi = parse_permutation(args.perm)
        gamma = _group_from_file(args.gamma, pi.degree)
        out.write(format_permutation(canonical_rep(pi, gamma)) + "\n")

    elif verb == "normal-form":
        n, gens = parse_generator_list(read_text(args.file))
        nf: List[Permutation] = normal_form(gens)
        out.write(format_generator_list(n, nf))

    elif verb == "gl-rank":
        m: MatrixFq = fq_linalg.parse_matrix(read_text(args.file))
        out.write(f"{to_user_index(fq_linalg.gl_rank(m), args)}\n")

    elif verb == "gl-unrank":
        out.write(fq_linalg.format_matrix(fq_linalg.gl_unrank(from_user_index(args.k, args), args.n, args.q)))

    elif verb == "gl-order":
        out.write(f"{fq_linalg.gl_order(args.n, args.q)}\n")

    elif verb == "rref":
        out.write(fq_linalg.format_matrix(fq_linalg.rref(fq_linalg.parse_matrix(read_text(args.file)))))

    else:
        raise UsageError(f"'{verb}' is not a codec verb")
    return 0
