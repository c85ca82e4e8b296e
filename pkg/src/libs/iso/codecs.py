"""
Orbit codecs: descriptions of a concatenation of t canonical strings, each
of them an isomorphic copy of a base object.

Every codec here shares one layout. The params are a framed payload

    kind tag (2 bits) | kind params (gamma) | codec body | t (gamma) | b (gamma)

and the index packs the t per-sample digits in blocks of b: a block of b_j
digits in radix N is one field of ceil(log2 N^b_j) bits, the first block
and, inside a block, the first sample most significant. The index range is
2^W for the total field width W, so the index cost is exactly W bits.

    blocked-lehmer   digit = Lehmer rank of a group element of S_n
    blocked-gl       digit = rank of a group element of GL_n(F_q)
    blocked-coset    digit = coset index of the element modulo a subgroup
                     of Aut(base); one or two bases, radix N0 + N1
    flat-scheme      digit = flat encoder index for the orbit sampler
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from libs.encoding import flat_encoder
from libs.encoding.cost_oracle import Codec, CostModel, Description
from libs.encoding.flat_encoder import FlatScheme
from libs.groups.coset_codec import CosetIndexing
from libs.groups.group_engine import PermGroup
from libs.groups.perm_core import Permutation, inverse
from libs.interfaces.errors import DomainError, HintFailure, InvariantViolation, RangeError
from libs.interfaces.typing import BigIndex, Bits
from libs.utils.bits import BitReader, BitWriter, field_width, frame, unframe
from libs.utils.configs import Settings
from libs.utils.pylog import Logger

from .framework import (
    GroupElement, Kind, MatrixSpaceKind, SymmetricKind, UniverseElement, make_kind,
)

logger = Logger(__name__)

BLOCKED_LEHMER: str = "blocked-lehmer"
BLOCKED_GL: str = "blocked-gl"
BLOCKED_COSET: str = "blocked-coset"
FLAT_SCHEME: str = "flat-scheme"

_TAG_WIDTH: int = 2
_PARAM_COUNTS: Dict[int, int] = {0: 1, 1: 3, 2: 1, 3: 3}
_CACHE_LIMIT: int = 64


# --- Blocking ---

def block_sizes(t: int, b: int) -> List[int]:
    if t < 1 or b < 1:
        raise DomainError(f"need t >= 1 and b >= 1, got t={t}, b={b}")
    full, rest = divmod(t, b)
    return [b] * full + ([rest] if rest else [])


def block_widths(radix: int, t: int, b: int) -> List[int]:
    return [field_width(radix ** size) for size in block_sizes(t, b)]


def pack_digits(digits: Sequence[int], radix: int, b: int) -> BigIndex:
    """
    Packs digits in [0, radix) into one index, b digits per field.

    Raises:
        RangeError: If a digit is outside [0, radix).
    """
    index: BigIndex = 0
    pos: int = 0
    for size, width in zip(block_sizes(len(digits), b), block_widths(radix, len(digits), b)):
        value: int = 0
        for d in digits[pos:pos + size]:
            if not 0 <= d < radix:
                raise RangeError(f"digit {d} is outside [0, {radix})")
            value = value * radix + d
        index = (index << width) | value
        pos += size
    return index


def unpack_digits(index: BigIndex, radix: int, t: int, b: int) -> List[int]:
    """
    Inverse of pack_digits.

    Raises:
        DomainError: If a field holds a value of radix^b_j or more.
    """
    sizes: List[int] = block_sizes(t, b)
    widths: List[int] = block_widths(radix, t, b)
    shift: int = sum(widths)
    digits: List[int] = []
    for size, width in zip(sizes, widths):
        shift -= width
        value: int = (index >> shift) & ((1 << width) - 1)
        if value >= radix ** size:
            raise DomainError(f"index field {value} exceeds {radix}^{size}")
        block: List[int] = []
        for _ in range(size):
            value, d = divmod(value, radix)
            block.append(d)
        digits.extend(reversed(block))
    return digits


# --- Params ---

@dataclass(frozen=True)
class OrbitParams:
    """Decoded params of an orbit codec."""
    kind: Kind
    bases: Tuple[Bits, ...]
    t: int
    b: int
    # Per base, generators of a subgroup of its automorphism group (permutation representation).
    generators: Tuple[Tuple[Permutation, ...], ...] = ()
    scheme: Optional[FlatScheme] = None


def _write_kind(writer: BitWriter, kind: Kind) -> None:
    writer.write_uint(kind.tag, _TAG_WIDTH)
    for value in kind.params():
        writer.write_gamma(value)


def _read_kind(reader: BitReader) -> Kind:
    tag: int = reader.read_uint(_TAG_WIDTH)
    params: List[int] = [reader.read_gamma() for _ in range(_PARAM_COUNTS[tag])]
    return make_kind(tag, params)


def _read_base(reader: BitReader, kind: Kind) -> Bits:
    base: Bits = reader.read_bits(kind.invariant_length())
    kind.from_invariant(base)
    return base


def _write_tail(writer: BitWriter, t: int, b: int) -> Bits:
    return frame(writer.write_gamma(t).write_gamma(b).getvalue())


def _read_tail(reader: BitReader) -> Tuple[int, int]:
    t, b = reader.read_gamma(), reader.read_gamma()
    reader.expect_end()
    if t < 1 or b < 1:
        raise DomainError(f"orbit params need t >= 1 and b >= 1, got t={t}, b={b}")
    return t, b


class OrbitCodec(Codec):
    """Shared blocking and params handling; subclasses supply the body and one digit's decoder."""

    def __init__(self) -> None:
        self._parsed: Dict[Bits, OrbitParams] = {}
        self._state: Dict[Bits, object] = {}

    def pack(self, params: OrbitParams) -> Bits:
        writer: BitWriter = BitWriter()
        _write_kind(writer, params.kind)
        self._write_body(writer, params)
        return _write_tail(writer, params.t, params.b)

    def unpack(self, params: Bits) -> OrbitParams:
        """
        Raises:
            DomainError: On malformed params.
        """
        if params not in self._parsed:
            reader: BitReader = BitReader(unframe(params))
            kind: Kind = _read_kind(reader)
            self._check_kind(kind)
            parsed: OrbitParams = self._read_body(reader, kind)
            t, b = _read_tail(reader)
            if len(self._parsed) >= _CACHE_LIMIT:
                self._parsed.clear()
                self._state.clear()
            self._parsed[params] = OrbitParams(parsed.kind, parsed.bases, t, b, parsed.generators, parsed.scheme)
        return self._parsed[params]

    def _state_for(self, params: Bits, parsed: OrbitParams) -> object:
        if params not in self._state:
            self._state[params] = self._build_state(parsed)
        return self._state[params]

    def index_range(self, params: Bits) -> int:
        parsed: OrbitParams = self.unpack(params)
        return 2 ** sum(block_widths(self.radix(parsed, self._state_for(params, parsed)), parsed.t, parsed.b))

    def decode(self, params: Bits, index: BigIndex) -> Bits:
        parsed: OrbitParams = self.unpack(params)
        state: object = self._state_for(params, parsed)
        digits: List[int] = unpack_digits(index, self.radix(parsed, state), parsed.t, parsed.b)
        return "".join(self.decode_digit(parsed, state, d) for d in digits)

    def describe(self, params: OrbitParams, digits: Sequence[int]) -> Description:
        """The description of the samples named by digits."""
        packed: Bits = self.pack(params)
        radix: int = self.radix(params, self._state_for(packed, self.unpack(packed)))
        return Description(self.codec_id, packed, pack_digits(digits, radix, params.b))

    def _check_kind(self, kind: Kind) -> None:
        pass

    def _build_state(self, parsed: OrbitParams) -> object:
        return None

    def _write_body(self, writer: BitWriter, params: OrbitParams) -> None:
        raise NotImplementedError

    def _read_body(self, reader: BitReader, kind: Kind) -> OrbitParams:
        raise NotImplementedError

    def radix(self, parsed: OrbitParams, state: object) -> int:
        raise NotImplementedError

    def decode_digit(self, parsed: OrbitParams, state: object, digit: int) -> Bits:
        raise NotImplementedError


class BlockedElementCodec(OrbitCodec):
    """One digit per sample: the rank of a group element h, decoding to the invariant of h(base)."""

    def __init__(self, codec_id: str):
        super().__init__()
        if codec_id not in (BLOCKED_LEHMER, BLOCKED_GL):
            raise DomainError(f"no element codec named '{codec_id}'")
        self.codec_id = codec_id

    def _check_kind(self, kind: Kind) -> None:
        family: type = SymmetricKind if self.codec_id == BLOCKED_LEHMER else MatrixSpaceKind
        if not isinstance(kind, family):
            raise DomainError(f"codec '{self.codec_id}' does not handle {kind!r}")

    def _write_body(self, writer: BitWriter, params: OrbitParams) -> None:
        writer.write_bits(params.bases[0])

    def _read_body(self, reader: BitReader, kind: Kind) -> OrbitParams:
        return OrbitParams(kind, (_read_base(reader, kind),), 0, 0)

    def _build_state(self, parsed: OrbitParams) -> object:
        return parsed.kind.from_invariant(parsed.bases[0])

    def radix(self, parsed: OrbitParams, state: object) -> int:
        return parsed.kind.group_order()

    def decode_digit(self, parsed: OrbitParams, state: UniverseElement, digit: int) -> Bits:
        kind: Kind = parsed.kind
        return kind.invariant(kind.act(kind.unrank_element(digit), state))


@dataclass
class _CosetState:
    representatives: List[UniverseElement]
    indexings: List[CosetIndexing]
    offsets: List[int]
    radix: int


class BlockedCosetCodec(OrbitCodec):
    """
    One digit per sample: the index of the coset inverse(h) Gamma, where
    Gamma is generated by automorphisms of the base. With two bases the
    digit ranges are stacked, base 0 first.
    """
    codec_id = BLOCKED_COSET

    def _write_body(self, writer: BitWriter, params: OrbitParams) -> None:
        if not 1 <= len(params.bases) <= 2 or len(params.generators) != len(params.bases):
            raise DomainError("a coset description needs one or two bases, each with its generator list")
        kind: Kind = params.kind
        width: int = field_width(kind.group_order())
        writer.write_uint(len(params.bases) - 1, 1)
        for base, gens in zip(params.bases, params.generators):
            writer.write_bits(base).write_gamma(len(gens))
            for g in gens:
                writer.write_uint(kind.rank_element(kind.from_permutation(g)), width)

    def _read_body(self, reader: BitReader, kind: Kind) -> OrbitParams:
        width: int = field_width(kind.group_order())
        count: int = reader.read_uint(1) + 1
        bases: List[Bits] = []
        generators: List[Tuple[Permutation, ...]] = []
        for _ in range(count):
            bases.append(_read_base(reader, kind))
            k: int = reader.read_gamma()
            gens: List[Permutation] = []
            for _ in range(k):
                rank: int = reader.read_uint(width)
                if rank >= kind.group_order():
                    raise DomainError(f"generator rank {rank} is outside the group")
                gens.append(kind.to_permutation(kind.unrank_element(rank)))
            generators.append(tuple(gens))
        return OrbitParams(kind, tuple(bases), 0, 0, tuple(generators))

    def _build_state(self, parsed: OrbitParams) -> _CosetState:
        kind: Kind = parsed.kind
        h: PermGroup = kind.group_as_perm()
        reps: List[UniverseElement] = []
        indexings: List[CosetIndexing] = []
        offsets: List[int] = []
        total: int = 0
        for base, gens in zip(parsed.bases, parsed.generators):
            rep: UniverseElement = kind.from_invariant(base)
            for g in gens:
                if kind.invariant(kind.act(kind.from_permutation(g), rep)) != base:
                    raise DomainError("a listed generator does not fix its base object")
            idx: CosetIndexing = CosetIndexing(h, PermGroup(h.degree, gens))
            reps.append(rep)
            indexings.append(idx)
            offsets.append(total)
            total += idx.count
        return _CosetState(reps, indexings, offsets, total)

    def radix(self, parsed: OrbitParams, state: _CosetState) -> int:
        return state.radix

    def decode_digit(self, parsed: OrbitParams, state: _CosetState, digit: int) -> Bits:
        j: int = 1 if len(state.offsets) > 1 and digit >= state.offsets[1] else 0
        pi: Permutation = state.indexings[j].unrank(digit - state.offsets[j])
        kind: Kind = parsed.kind
        return kind.invariant(kind.act(kind.from_permutation(inverse(pi)), state.representatives[j]))

    # Digits for the samples act(tau, base j).
    def digits(self, params: OrbitParams, samples: Sequence[Tuple[int, GroupElement]]) -> List[int]:
        packed: Bits = self.pack(params)
        state: _CosetState = self._state_for(packed, self.unpack(packed))
        kind: Kind = params.kind
        return [state.offsets[j] + state.indexings[j].rank(inverse(kind.to_permutation(tau))) for j, tau in samples]


class FlatSchemeCodec(OrbitCodec):
    """One digit per sample: its flat encoder index under the orbit sampler of the base."""
    codec_id = FLAT_SCHEME

    def _write_body(self, writer: BitWriter, params: OrbitParams) -> None:
        if params.scheme is None:
            raise DomainError("a flat-scheme description needs a scheme")
        writer.write_bits(params.bases[0]).write_bits(params.scheme.to_bits())

    def _read_body(self, reader: BitReader, kind: Kind) -> OrbitParams:
        base: Bits = _read_base(reader, kind)
        program: flat_encoder.BitProgram = flat_encoder.orbit_program(kind, kind.from_invariant(base))
        scheme: FlatScheme = FlatScheme.read_bits(reader, program)
        if scheme.ell != program.ell:
            raise DomainError(f"scheme reads {scheme.ell} bits, the orbit sampler takes {program.ell}")
        return OrbitParams(kind, (base,), 0, 0, (), scheme)

    def radix(self, parsed: OrbitParams, state: object) -> int:
        return parsed.scheme.index_range

    def decode_digit(self, parsed: OrbitParams, state: object, digit: int) -> Bits:
        return flat_encoder.decode(parsed.scheme, digit)


# --- Hint builders ---

def element_hint(codec: BlockedElementCodec, kind: Kind, base: UniverseElement,
                 taus: Sequence[GroupElement], b: int) -> Description:
    """Blocked description of the samples invariant(act(tau_i, base))."""
    params: OrbitParams = OrbitParams(kind, (kind.invariant(base),), len(taus), b)
    return codec.describe(params, [kind.rank_element(tau) for tau in taus])


def coset_hint(codec: BlockedCosetCodec, kind: Kind, bases: Sequence[UniverseElement],
               generators: Sequence[Sequence[Permutation]], samples: Sequence[Tuple[int, GroupElement]],
               b: int) -> Description:
    """
    Blocked coset description of the samples invariant(act(tau, bases[j]))
    for every (j, tau) in samples.
    """
    params: OrbitParams = OrbitParams(
        kind, tuple(kind.invariant(w) for w in bases), len(samples), b, tuple(tuple(g) for g in generators)
    )
    return codec.describe(params, codec.digits(params, samples))


def flat_hint(codec: FlatSchemeCodec, kind: Kind, base: UniverseElement, scheme: FlatScheme,
              samples: Sequence[Bits], b: int) -> Description:
    """
    Raises:
        HintFailure: If some sample has no working hash (it lies outside the orbit).
    """
    try:
        digits: List[int] = [flat_encoder.encode(scheme, y) for y in samples]
    except InvariantViolation:
        raise HintFailure("a sample lies outside the orbit the scheme was built for")
    params: OrbitParams = OrbitParams(kind, (kind.invariant(base),), len(samples), b, (), scheme)
    return codec.describe(params, digits)


@dataclass
class OrbitCodecs:
    """The orbit codecs registered in one cost model."""
    lehmer: BlockedElementCodec
    gl: BlockedElementCodec
    coset: BlockedCosetCodec
    flat: FlatSchemeCodec

    def element(self, kind: Kind) -> BlockedElementCodec:
        return self.gl if isinstance(kind, MatrixSpaceKind) else self.lehmer


def build_cost_model(settings: Optional[Settings] = None) -> Tuple[CostModel, OrbitCodecs]:
    """The shipped registry: literal plus the four orbit codecs."""
    c_machine: int = settings.cost_model.c_machine if settings is not None else 64
    codecs: OrbitCodecs = OrbitCodecs(
        BlockedElementCodec(BLOCKED_LEHMER), BlockedElementCodec(BLOCKED_GL), BlockedCosetCodec(), FlatSchemeCodec()
    )
    model: CostModel = CostModel(c_machine)
    for codec in (codecs.lehmer, codecs.gl, codecs.coset, codecs.flat):
        model.register(codec)
    return model, codecs
