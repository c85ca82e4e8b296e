"""
Description cost: an auditable stand-in for time-bounded Kolmogorov
complexity.

A description is (codec_id, params, index). Its cost is
|params| + ceil(log2 of the codec's index range) + c_machine. The cost of a
string is the least cost among the hinted descriptions that really decode
to it, and the literal description (|y| + c_machine) is always available.
Every registered codec is injective in its index for fixed params and keeps
its params self-delimiting, which is what lets counting_audit bound how
many strings can be cheap.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional

from libs.interfaces.errors import AuditFailure, DomainError, ReductionError
from libs.interfaces.typing import BigIndex, Bits
from libs.utils.pylog import Logger

logger = Logger(__name__)

LITERAL: str = "literal"


@dataclass(frozen=True)
class Description:
    codec_id: str
    params: Bits
    index: BigIndex


class Codec(ABC):
    """
    An injective decoder from [0, index_range(params)) to strings.

    Subclasses must keep `params` self-delimiting (see libs.utils.bits.frame)
    unless they take no params at all.
    """
    codec_id: str = ""
    self_delimiting: bool = True

    @abstractmethod
    def index_range(self, params: Bits) -> int:
        """Number of valid indices under these params."""

    @abstractmethod
    def decode(self, params: Bits, index: BigIndex) -> Bits:
        """Returns the string named by (params, index); raises ReductionError if malformed."""

    def param_cost(self, params: Bits) -> int:
        return len(params)

    def index_bits(self, params: Bits) -> int:
        return (self.index_range(params) - 1).bit_length()


class LiteralCodec(Codec):
    """The string spelled out in the params; one index."""
    codec_id = LITERAL
    self_delimiting = False

    def index_range(self, params: Bits) -> int:
        return 1

    def decode(self, params: Bits, index: BigIndex) -> Bits:
        if index != 0:
            raise DomainError(f"the literal codec has a single index, got {index}")
        return params


@dataclass(frozen=True)
class CostReport:
    codec_id: str
    params_bits: int
    index_bits: int
    total: int

    def line(self) -> str:
        return f"{self.codec_id} {self.params_bits} {self.index_bits} {self.total}"


@dataclass(frozen=True)
class AuditCertificate:
    """Counting breakdown for strings of one length at one cost bound."""
    c: int
    ell: int
    c_machine: int
    per_codec: Mapping[str, int]
    total_bound: int
    limit: int

    @property
    def holds(self) -> bool:
        return self.total_bound < self.limit


@dataclass
class CostModel:
    """A flat per-description surcharge plus the registered codecs. Register before use."""
    c_machine: int = 64
    codecs: Dict[str, Codec] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.c_machine < 0:
            raise DomainError(f"c_machine must be nonnegative, got {self.c_machine}")
        self.codecs.setdefault(LITERAL, LiteralCodec())

    def register(self, codec: Codec) -> "CostModel":
        if codec.codec_id in self.codecs:
            raise DomainError(f"codec '{codec.codec_id}' is already registered")
        self.codecs[codec.codec_id] = codec
        return self

    def literal(self, y: Bits) -> Description:
        return Description(LITERAL, y, 0)

    # Cost of a description that is known to decode correctly.
    def report(self, desc: Description) -> CostReport:
        codec: Codec = self.codecs[desc.codec_id]
        params_bits: int = codec.param_cost(desc.params)
        index_bits: int = codec.index_bits(desc.params)
        return CostReport(desc.codec_id, params_bits, index_bits, params_bits + index_bits + self.c_machine)

    def check(self, y: Bits, desc: Description) -> Optional[str]:
        """Returns None if desc decodes to y, otherwise the reason it is rejected."""
        codec: Optional[Codec] = self.codecs.get(desc.codec_id)
        if codec is None:
            return f"unknown codec '{desc.codec_id}'"
        try:
            size: int = codec.index_range(desc.params)
            if not 0 <= desc.index < size:
                return f"index {desc.index} is outside [0, {size})"
            decoded: Bits = codec.decode(desc.params, desc.index)
        except ReductionError as e:
            return f"does not decode: {e}"
        if decoded != y:
            return "decodes to a different string"
        return None


def explain(model: CostModel, y: Bits, hints: Iterable[Description] = ()) -> CostReport:
    """
    Returns the report of the cheapest description of y among the literal
    and the hints that decode to y. Rejected hints are logged and skipped.
    """
    best: CostReport = model.report(model.literal(y))
    for desc in hints:
        reason: Optional[str] = model.check(y, desc)
        if reason is not None:
            logger.warning(f"Rejected '{desc.codec_id}' hint: {reason}")
            continue
        candidate: CostReport = model.report(desc)
        if candidate.total < best.total:
            best = candidate
    return best


def cost(model: CostModel, y: Bits, hints: Iterable[Description] = ()) -> int:
    return explain(model, y, hints).total


def counting_audit(model: CostModel, c: int, ell: int, sample: Bits = "0110100110010110") -> AuditCertificate:
    """
    Bounds the number of length-ell strings whose cost is at most c.

    With C = c - c_machine, the literal codec names 2^ell such strings when
    ell <= C and none otherwise. A codec with prefix-free params names at
    most 2^C strings of cost <= c by the Kraft inequality (a params blob of
    length p leaves at most 2^(C-p) indices). The certificate holds when the
    sum stays below 2^(c+1).

    Raises:
        AuditFailure: If a codec charges fewer bits than its params hold, or
            its params are not self-delimiting.
    """
    budget: int = c - model.c_machine
    per_codec: Dict[str, int] = {}
    for codec_id, codec in sorted(model.codecs.items()):
        if codec_id == LITERAL:
            per_codec[codec_id] = 2 ** ell if 0 <= ell <= budget else 0
            continue
        if not codec.self_delimiting:
            raise AuditFailure(f"codec '{codec_id}' does not declare self-delimiting params")
        if codec.param_cost(sample) < len(sample):
            raise AuditFailure(
                f"codec '{codec_id}' leaves parameter bits unaccounted"
                f"\n|- charged {codec.param_cost(sample)} bits for a {len(sample)}-bit blob"
            )
        per_codec[codec_id] = 2 ** budget if budget >= 0 else 0

    total: int = sum(per_codec.values())
    certificate: AuditCertificate = AuditCertificate(c, ell, model.c_machine, per_codec, total, 2 ** (c + 1))
    if not certificate.holds:
        raise AuditFailure(f"{total} strings of length {ell} may cost at most {c}; the bound is {2 ** (c + 1)}")
    return certificate
