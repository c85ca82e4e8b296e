from .framework import (
    Kind, SymmetricKind, GraphKind, CodeKind, ConjugacyKind, MatrixSpaceKind, Graph, IsoInstance,
    OrbitTable, KIND_NAMES, make_kind, act, complete_invariant, sample_isomorphic_copy,
)
from .formats import (
    parse_object, format_object, parse_instance, format_instance, parse_object_file, format_object_file,
)
from .codecs import (
    OrbitCodec, OrbitParams, OrbitCodecs, BlockedElementCodec, BlockedCosetCodec, FlatSchemeCodec,
    build_cost_model, element_hint, coset_hint, flat_hint, pack_digits, unpack_digits, block_sizes,
    BLOCKED_LEHMER, BLOCKED_GL, BLOCKED_COSET, FLAT_SCHEME,
)
