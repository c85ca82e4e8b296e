from .flat_encoder import (
    BitProgram, LinearHash, FlatScheme, build_scheme, encode, decode, kernel_unrank,
    works_for, works_for_rate, max_entropy, orbit_program, scheme_shape,
)
from .cost_oracle import (
    Codec, LiteralCodec, Description, CostModel, CostReport, AuditCertificate,
    cost, explain, counting_audit, LITERAL,
)
