# This file contains unit tests for the description-cost model and its
# counting audit.

import sys
import os
from typing import List, Optional

import numpy as np
import pytest

# Add the 'src' directory to the Python path to allow importing library modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from libs.encoding.cost_oracle import (
    LITERAL, AuditCertificate, Codec, CostModel, CostReport, Description, LiteralCodec, cost, counting_audit, explain,
)
from libs.interfaces.errors import AuditFailure, DomainError
from libs.iso.codecs import BLOCKED_LEHMER, build_cost_model, element_hint
from libs.iso.framework import Graph, GraphKind
from libs.utils.bits import frame, unframe


# A toy codec: params name a bit string, the index picks one of its rotations.
class RotationCodec(Codec):
    codec_id = "rotation"

    def index_range(self, params: str) -> int:
        return len(unframe(params))

    def decode(self, params: str, index: int) -> str:
        word: str = unframe(params)
        return word[index:] + word[:index]


# Undercharges its params.
class CheatingCodec(RotationCodec):
    codec_id = "cheating"

    def param_cost(self, params: str) -> int:
        return 1


# Params name a pattern, the index says how many times to repeat it, minus one.
class PeriodicCodec(Codec):
    codec_id = "periodic"

    def index_range(self, params: str) -> int:
        return 256

    def decode(self, params: str, index: int) -> str:
        return unframe(params) * (index + 1)


class UndelimitedCodec(RotationCodec):
    codec_id = "undelimited"
    self_delimiting = False


# Tests the literal description.
def test_literal_cost() -> None:
    """
    With no hints the cost is |y| + c_machine.
    """
    model: CostModel = CostModel(64)
    report: CostReport = explain(model, "1011")
    assert report == CostReport(LITERAL, 4, 0, 68)
    assert report.line() == "literal 4 0 68"
    with pytest.raises(DomainError):
        LiteralCodec().decode("1", 1)


# Tests that the cheapest valid hint wins.
def test_explain_picks_cheapest_valid_hint() -> None:
    """
    A periodic word is far cheaper through its pattern than spelled out; a
    hint decoding to another string, an unknown codec and an index out of
    range are all skipped.
    """
    model: CostModel = CostModel(0).register(PeriodicCodec())
    y: str = "0011" * 40
    good: Description = Description("periodic", frame("0011"), 39)
    wrong: Description = Description("periodic", frame("0011"), 38)
    hints: List[Description] = [wrong, Description("nope", "", 0), Description("periodic", frame("0011"), 999), good]
    report: CostReport = explain(model, y, hints)
    assert report.codec_id == "periodic"
    assert report.total == len(frame("0011")) + 8
    assert model.check(y, wrong) == "decodes to a different string"
    assert model.check(y, good) is None
    assert explain(model, y, hints[:3]).codec_id == LITERAL


# Tests the cost arithmetic of a hint.
def test_hint_cost_arithmetic() -> None:
    """
    cost = |params| + ceil(log2 index_range) + c_machine.
    """
    model: CostModel = CostModel(5).register(RotationCodec())
    word: str = "1" + "0" * 15
    y: str = word[4:] + word[:4]
    desc: Description = Description("rotation", frame(word), 4)
    report: CostReport = model.report(desc)
    assert report.params_bits == len(frame(word))
    assert report.index_bits == 4
    assert report.total == len(frame(word)) + 4 + 5
    assert cost(model, y, [desc]) == min(report.total, len(y) + 5)


# Tests registry errors.
def test_register_twice() -> None:
    """
    A codec id can be registered once; negative surcharges are rejected.
    """
    model: CostModel = CostModel().register(RotationCodec())
    with pytest.raises(DomainError):
        model.register(RotationCodec())
    with pytest.raises(DomainError):
        CostModel(-1)


# Tests the counting audit on the shipped registry.
@pytest.mark.parametrize('c, ell', [(64, 16), (80, 16), (100, 36), (200, 180)])
def test_counting_audit_shipped_registry(c: int, ell: int) -> None:
    """
    The literal codec plus the four orbit codecs never name 2^(c+1) strings
    of cost at most c.
    """
    model, _ = build_cost_model()
    cert: AuditCertificate = counting_audit(model, c, ell)
    assert cert.holds
    assert set(cert.per_codec) == set(model.codecs)
    assert cert.total_bound == sum(cert.per_codec.values())
    assert cert.limit == 2 ** (c + 1)


# Tests that the audit catches codecs that hide bits.
def test_counting_audit_failures() -> None:
    """
    Undercharged or undelimited params fail the audit.
    """
    with pytest.raises(AuditFailure):
        counting_audit(CostModel(0).register(CheatingCodec()), 20, 8)
    with pytest.raises(AuditFailure):
        counting_audit(CostModel(0).register(UndelimitedCodec()), 20, 8)


# Tests that random strings are almost never cheap.
def test_random_strings_are_incompressible() -> None:
    """
    Of 10^4 uniform 16-bit strings, at most 3 * 2^-7 of them cost 8 bits or
    less, even with an orbit hint offered whenever the string is a 4-vertex
    graph.
    """
    rng: np.random.Generator = np.random.default_rng(0)
    model, codecs = build_cost_model()
    model.c_machine = 0
    kind: GraphKind = GraphKind(4)
    cheap: int = 0
    trials: int = 10_000
    for value in rng.integers(0, 2 ** 16, size=trials):
        y: str = format(int(value), "016b")
        hints: List[Description] = []
        graph: Optional[Graph] = None
        try:
            graph = kind.from_invariant(y)
        except DomainError:
            pass
        if graph is not None:
            hints.append(element_hint(codecs.lehmer, kind, graph, [kind.identity()], 1))
        if cost(model, y, hints) <= 16 - 8:
            cheap += 1
    assert cheap / trials <= 3 * 2 ** -7
    assert codecs.lehmer.codec_id == BLOCKED_LEHMER
