from .codecs import surface as CodecsSurface, register as register_codecs, VERBS as CODEC_VERBS
from .encoding import surface as EncodingSurface, register as register_encoding, VERBS as ENCODING_VERBS
from .reduction import surface as ReductionSurface, register as register_reduction, VERBS as REDUCTION_VERBS
