# This file contains unit tests for the orbit codecs: digit blocking, the
# element, coset and flat-scheme descriptions, and malformed params.

import sys
import os
from typing import List, Tuple

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add the 'src' directory to the Python path to allow importing library modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from libs.encoding import flat_encoder
from libs.encoding.cost_oracle import CostReport, Description
from libs.encoding.flat_encoder import FlatScheme
from libs.groups.perm_core import Permutation
from libs.interfaces.errors import DomainError, HintFailure, RangeError
from libs.iso.codecs import (
    BLOCKED_COSET, BLOCKED_GL, BLOCKED_LEHMER, FLAT_SCHEME, OrbitParams, block_sizes, block_widths,
    build_cost_model, coset_hint, element_hint, flat_hint, pack_digits, unpack_digits,
)
from libs.iso.framework import Graph, GraphKind, Kind, MatrixSpaceKind
from libs.harness.instances import random_graph, random_object
from libs.utils.bits import BitWriter, frame, unframe
from libs.utils.configs import Settings

PATH: Graph = Graph.from_edges(4, [(1, 2), (2, 3), (3, 4)])
STAR: Graph = Graph.from_edges(4, [(1, 2), (1, 3), (1, 4)])
PATH_AUT: List[Permutation] = [Permutation.from_cycles(4, [(1, 4), (2, 3)])]
STAR_AUT: List[Permutation] = [Permutation.from_cycles(4, [(2, 3)]), Permutation.from_cycles(4, [(3, 4)])]


# Tests the split of t samples into blocks.
def test_block_sizes() -> None:
    """
    Full blocks of b, then the remainder; t or b below one is rejected.
    """
    assert block_sizes(10, 4) == [4, 4, 2]
    assert block_sizes(8, 4) == [4, 4]
    assert block_sizes(3, 8) == [3]
    assert block_widths(10, 3, 2) == [7, 4]
    with pytest.raises(DomainError):
        block_sizes(0, 1)
    with pytest.raises(DomainError):
        block_sizes(4, 0)


# Tests the packed layout on a small example.
def test_pack_digits_layout() -> None:
    """
    Digits 1 2 3 in radix 10, two per block: fields 12 (7 bits) and 3 (4 bits).
    """
    assert pack_digits([1, 2, 3], 10, 2) == (12 << 4) | 3
    assert unpack_digits((12 << 4) | 3, 10, 3, 2) == [1, 2, 3]
    with pytest.raises(RangeError):
        pack_digits([1, 10], 10, 2)
    # 127 fills the 7-bit field but is not a two-digit number in radix 10.
    with pytest.raises(DomainError):
        unpack_digits(127 << 4, 10, 3, 2)


# Tests that unpacking inverts packing.
@settings(max_examples=100, deadline=None)
@given(
    radix=st.integers(min_value=2, max_value=2000),
    b=st.integers(min_value=1, max_value=9),
    data=st.data(),
)
def test_pack_unpack(radix: int, b: int, data: st.DataObject) -> None:
    """
    Any digit list comes back from its index, and the index fits the field widths.
    """
    digits: List[int] = data.draw(st.lists(st.integers(min_value=0, max_value=radix - 1), min_size=1, max_size=25))
    index: int = pack_digits(digits, radix, b)
    assert index < 2 ** sum(block_widths(radix, len(digits), b))
    assert unpack_digits(index, radix, len(digits), b) == digits


# Tests the shipped registry.
def test_build_cost_model() -> None:
    """
    The shipped registry holds the literal codec and the four orbit codecs,
    with the configured surcharge.
    """
    model, codecs = build_cost_model(Settings.model_validate({"cost_model": {"c_machine": 40}}))
    assert model.c_machine == 40
    assert {BLOCKED_LEHMER, BLOCKED_GL, BLOCKED_COSET, FLAT_SCHEME} <= set(model.codecs)
    assert codecs.element(GraphKind(3)) is codecs.lehmer
    assert codecs.element(MatrixSpaceKind(2, 1, 2)) is codecs.gl


# Tests element descriptions for both families of groups.
@pytest.mark.parametrize('kind, t, b', [
    (GraphKind(5), 12, 4),
    (GraphKind(6), 7, 3),
    (MatrixSpaceKind(2, 2, 3), 9, 2),
    (MatrixSpaceKind(2, 1, 2), 5, 8),
])
def test_element_hint_decodes_to_samples(kind: Kind, t: int, b: int) -> None:
    """
    The description decodes to the concatenated samples and costs its params
    plus the packed field widths.
    """
    rng: np.random.Generator = np.random.default_rng(t * 10 + b)
    model, codecs = build_cost_model()
    base = random_object(kind, rng)
    taus = [kind.random_element(rng) for _ in range(t)]
    y: str = "".join(kind.invariant(kind.act(tau, base)) for tau in taus)
    desc: Description = element_hint(codecs.element(kind), kind, base, taus, b)
    assert model.check(y, desc) is None
    report: CostReport = model.report(desc)
    assert report.index_bits == sum(block_widths(kind.group_order(), t, b))
    assert report.params_bits == len(desc.params)


# Tests that each element codec refuses the other family.
def test_element_codec_rejects_other_family() -> None:
    """
    Params for a matrix space do not parse under the Lehmer codec.
    """
    rng: np.random.Generator = np.random.default_rng(1)
    _, codecs = build_cost_model()
    kind: MatrixSpaceKind = MatrixSpaceKind(2, 1, 2)
    desc: Description = element_hint(codecs.gl, kind, random_object(kind, rng), [kind.identity()], 1)
    with pytest.raises(DomainError):
        codecs.lehmer.index_range(desc.params)


# Draws random relabellings of the listed bases.
def _coset_samples(t: int, bases: int, rng: np.random.Generator) -> List[Tuple[int, Permutation]]:
    kind: GraphKind = GraphKind(4)
    return [(int(rng.integers(0, bases)), kind.random_element(rng)) for _ in range(t)]


# Tests the coset codec with one base.
def test_coset_hint_one_base() -> None:
    """
    The path on 4 vertices has two automorphisms, so the radix is 12; the
    samples decode back and the index is shorter than the element codec's.
    """
    rng: np.random.Generator = np.random.default_rng(2)
    kind: GraphKind = GraphKind(4)
    model, codecs = build_cost_model()
    samples = _coset_samples(8, 1, rng)
    y: str = "".join(kind.invariant(kind.act(tau, PATH)) for _, tau in samples)
    desc: Description = coset_hint(codecs.coset, kind, [PATH], [PATH_AUT], samples, 4)
    assert model.check(y, desc) is None
    assert codecs.coset.index_range(desc.params) == 2 ** sum(block_widths(12, 8, 4))
    element: Description = element_hint(codecs.lehmer, kind, PATH, [tau for _, tau in samples], 4)
    assert model.report(desc).index_bits < model.report(element).index_bits


# Tests the coset codec with two bases.
def test_coset_hint_two_bases() -> None:
    """
    Path and star stack 12 + 4 cosets into radix 16; mixed samples decode back.
    """
    rng: np.random.Generator = np.random.default_rng(3)
    kind: GraphKind = GraphKind(4)
    model, codecs = build_cost_model()
    bases: List[Graph] = [PATH, STAR]
    samples = _coset_samples(10, 2, rng)
    y: str = "".join(kind.invariant(kind.act(tau, bases[j])) for j, tau in samples)
    desc: Description = coset_hint(codecs.coset, kind, bases, [PATH_AUT, STAR_AUT], samples, 3)
    assert model.check(y, desc) is None
    assert codecs.coset.index_range(desc.params) == 2 ** sum(block_widths(16, 10, 3))


# Tests the trivial subgroup.
def test_coset_hint_without_generators() -> None:
    """
    With no automorphisms listed the coset codec indexes all of S_4.
    """
    rng: np.random.Generator = np.random.default_rng(4)
    kind: GraphKind = GraphKind(4)
    model, codecs = build_cost_model()
    samples = _coset_samples(5, 1, rng)
    y: str = "".join(kind.invariant(kind.act(tau, PATH)) for _, tau in samples)
    desc: Description = coset_hint(codecs.coset, kind, [PATH], [[]], samples, 5)
    assert model.check(y, desc) is None
    assert codecs.coset.index_range(desc.params) == 2 ** sum(block_widths(24, 5, 5))


# Tests that listed generators must fix their base.
def test_coset_hint_rejects_non_automorphisms() -> None:
    """
    A transposition that moves the path is not an automorphism.
    """
    rng: np.random.Generator = np.random.default_rng(5)
    _, codecs = build_cost_model()
    bad: List[Permutation] = [Permutation.from_cycles(4, [(1, 2)])]
    with pytest.raises(DomainError):
        coset_hint(codecs.coset, GraphKind(4), [PATH], [bad], _coset_samples(3, 1, rng), 2)
    with pytest.raises(DomainError):
        coset_hint(codecs.coset, GraphKind(4), [PATH, STAR, PATH], [[], [], []], _coset_samples(3, 1, rng), 2)


# Tests the flat-scheme codec on the orbit sampler of a small graph.
def test_flat_hint() -> None:
    """
    Samples from the orbit decode back; a graph outside the orbit has no
    index; the params carry the scheme.
    """
    rng: np.random.Generator = np.random.default_rng(6)
    kind: GraphKind = GraphKind(4)
    model, codecs = build_cost_model()
    program: flat_encoder.BitProgram = flat_encoder.orbit_program(kind, PATH)
    scheme: FlatScheme = flat_encoder.build_scheme(program, flat_encoder.max_entropy(program), rng)
    samples: List[str] = [kind.invariant(kind.act(kind.random_element(rng), PATH)) for _ in range(6)]
    desc: Description = flat_hint(codecs.flat, kind, PATH, scheme, samples, 3)
    assert model.check("".join(samples), desc) is None
    assert codecs.flat.unpack(desc.params).scheme.count == scheme.count
    with pytest.raises(HintFailure):
        flat_hint(codecs.flat, kind, PATH, scheme, [kind.invariant(STAR)], 1)


# Builds framed element params by hand: graph tag, n = 3, a base, then t and b.
def _graph_params(base: str, t: int = 1, b: int = 1) -> str:
    writer: BitWriter = BitWriter().write_uint(0, 2).write_gamma(3).write_bits(base)
    return frame(writer.write_gamma(t).write_gamma(b).getvalue())


# Tests malformed params.
def test_malformed_params() -> None:
    """
    Empty params, trailing bits, bases that are not graphs and t = 0 are
    all DomainErrors.
    """
    _, codecs = build_cost_model()
    triangle: str = GraphKind(3).invariant(Graph.from_edges(3, [(1, 2), (2, 3), (1, 3)]))
    assert codecs.lehmer.index_range(_graph_params(triangle, 4, 2)) == 2 ** sum(block_widths(6, 4, 2))
    with pytest.raises(DomainError):
        codecs.lehmer.unpack("")
    with pytest.raises(DomainError):
        codecs.lehmer.unpack(frame(unframe(_graph_params(triangle)) + "1"))
    with pytest.raises(DomainError):
        codecs.lehmer.unpack(_graph_params("100000000"))
    with pytest.raises(DomainError):
        codecs.lehmer.unpack(_graph_params(triangle, t=0))
    with pytest.raises(DomainError):
        codecs.coset.unpack(_graph_params(triangle))


# Tests packing and unpacking element params.
def test_orbit_params_round_trip() -> None:
    """
    pack then unpack keeps the kind, the base, t and b.
    """
    rng: np.random.Generator = np.random.default_rng(7)
    _, codecs = build_cost_model()
    kind: GraphKind = GraphKind(5)
    base: str = kind.invariant(random_graph(5, rng))
    parsed: OrbitParams = codecs.lehmer.unpack(codecs.lehmer.pack(OrbitParams(kind, (base,), 9, 4)))
    assert (parsed.kind, parsed.bases, parsed.t, parsed.b) == (kind, (base,), 9, 4)
