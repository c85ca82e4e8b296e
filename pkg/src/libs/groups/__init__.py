from .perm_core import (
    Permutation, apply, compose, inverse, lehmer_rank, lehmer_unrank,
    format_permutation, parse_permutation, format_generator_list, parse_generator_list,
)
from .group_engine import PermGroup, ErdosRenyiSampler, random_subproduct, near_uniform_element
from .coset_codec import CosetIndexing, canonical_rep, coset_rank, coset_unrank, normal_form
