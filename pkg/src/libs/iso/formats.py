"""
Text formats for universe elements and isomorphism instances.

An instance file is a kind header line ("graph", "code", "conjugacy" or
"matrix-space") followed by the two payloads, separated by a blank line.

Payloads:
    graph          "n", then n rows of 0/1 adjacency entries
    code           the fq_linalg matrix format ("d n q", then d rows)
    conjugacy      the perm_core generator-list format ("n k", then k permutations)
    matrix-space   "d n q", then d blocks of n rows
"""

from typing import List, Sequence, Tuple

import numpy as np

from libs.fields.fq_linalg import MatrixFq, _parse_matrix_lines, format_matrix
from libs.groups.perm_core import format_generator_list, parse_generator_list
from libs.interfaces.errors import DomainError

from .framework import (
    KIND_NAMES, CodeKind, ConjugacyKind, Graph, GraphKind, IsoInstance, Kind, MatrixSpaceKind,
    UniverseElement,
)


def _int_row(line: str) -> List[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise DomainError(f"expected a row of integers\n|- {line!r}")


# --- Per-kind payloads ---

def _parse_graph(lines: Sequence[str]) -> Tuple[Kind, Graph]:
    header: List[int] = _int_row(lines[0])
    if len(header) != 1:
        raise DomainError(f"graph header must be 'n'\n|- {lines[0]!r}")
    n: int = header[0]
    if len(lines) - 1 != n:
        raise DomainError(f"graph header announces {n} rows, found {len(lines) - 1}")
    rows: List[List[int]] = [_int_row(line) for line in lines[1:]]
    if any(len(row) != n for row in rows):
        raise DomainError(f"every adjacency row needs {n} entries")
    return GraphKind(n), Graph(np.array(rows, dtype=np.int64).reshape(n, n))


def _format_graph(w: Graph) -> str:
    lines: List[str] = [str(w.n)]
    lines.extend(" ".join(str(int(v)) for v in row) for row in w.adjacency)
    return "\n".join(lines) + "\n"


def _parse_code(lines: Sequence[str]) -> Tuple[Kind, MatrixFq]:
    m: MatrixFq = _parse_matrix_lines(lines)
    return CodeKind(m.cols, m.rows, m.q), m


def _parse_conjugacy(lines: Sequence[str]) -> Tuple[Kind, Tuple]:
    n, gens = parse_generator_list("\n".join(lines))
    return ConjugacyKind(n), tuple(gens)


def _parse_matrix_space(lines: Sequence[str]) -> Tuple[Kind, Tuple[MatrixFq, ...]]:
    header: List[int] = _int_row(lines[0])
    if len(header) != 3:
        raise DomainError(f"matrix-space header must be 'd n q'\n|- {lines[0]!r}")
    d, n, q = header
    if len(lines) - 1 != d * n:
        raise DomainError(f"matrix-space header announces {d * n} rows, found {len(lines) - 1}")
    basis: List[MatrixFq] = []
    for i in range(d):
        block: List[str] = [f"{n} {n} {q}"] + list(lines[1 + i * n: 1 + (i + 1) * n])
        basis.append(_parse_matrix_lines(block))
    return MatrixSpaceKind(n, d, q), tuple(basis)


def _format_matrix_space(kind: MatrixSpaceKind, w: Sequence[MatrixFq]) -> str:
    lines: List[str] = [f"{kind.d} {kind.n} {kind.q}"]
    for m in w:
        lines.extend(" ".join(str(int(v)) for v in row) for row in m.data)
    return "\n".join(lines) + "\n"


_PARSERS = {
    "graph": _parse_graph,
    "code": _parse_code,
    "conjugacy": _parse_conjugacy,
    "matrix-space": _parse_matrix_space,
}


def parse_object(kind_name: str, text: str) -> Tuple[Kind, UniverseElement]:
    """
    Reads one payload of the given kind.

    Returns:
        The kind (its params read off the payload header) and the validated element.

    Raises:
        DomainError: On an unknown kind or a malformed payload.
    """
    if kind_name not in _PARSERS:
        raise DomainError(f"unknown kind '{kind_name}'\n|- expected one of {', '.join(KIND_NAMES)}")
    lines: List[str] = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DomainError(f"empty {kind_name} payload")
    kind, w = _PARSERS[kind_name](lines)
    kind.validate(w)
    return kind, w


def format_object(kind: Kind, w: UniverseElement) -> str:
    if isinstance(kind, GraphKind):
        return _format_graph(w)
    if isinstance(kind, CodeKind):
        return format_matrix(w)
    if isinstance(kind, ConjugacyKind):
        return format_generator_list(kind.n, list(w))
    if isinstance(kind, MatrixSpaceKind):
        return _format_matrix_space(kind, w)
    raise DomainError(f"no text format for {kind!r}")


# Splits text into blank-line separated chunks.
def _paragraphs(text: str) -> List[str]:
    chunks: List[str] = []
    current: List[str] = []
    for line in text.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            chunks.append("\n".join(current))
            current = []
    if current:
        chunks.append("\n".join(current))
    return chunks


def parse_instance(text: str) -> IsoInstance:
    """
    Reads an instance file.

    Raises:
        DomainError: If the header is missing, the payload count is not two,
            or the two payloads belong to different universes.
    """
    lines: List[str] = text.splitlines()
    while lines and not lines[0].strip():
        lines.pop(0)
    if not lines:
        raise DomainError("empty instance file")
    kind_name: str = lines[0].strip()
    payloads: List[str] = _paragraphs("\n".join(lines[1:]))
    if len(payloads) != 2:
        raise DomainError(f"an instance holds two payloads separated by a blank line, found {len(payloads)}")
    kind0, x0 = parse_object(kind_name, payloads[0])
    kind1, x1 = parse_object(kind_name, payloads[1])
    if kind0 != kind1:
        raise DomainError(f"payloads live in different universes\n|- {kind0!r} vs {kind1!r}")
    return IsoInstance(kind0, x0, x1)


def format_instance(instance: IsoInstance) -> str:
    return "\n".join([
        instance.kind.name,
        format_object(instance.kind, instance.x0),
        format_object(instance.kind, instance.x1),
    ])


def parse_object_file(text: str) -> Tuple[Kind, UniverseElement]:
    """Reads a single-object file: the kind header line, then one payload."""
    lines: List[str] = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DomainError("empty object file")
    return parse_object(lines[0].strip(), "\n".join(lines[1:]))


def format_object_file(kind: Kind, w: UniverseElement) -> str:
    return f"{kind.name}\n{format_object(kind, w)}"
