from .fq_linalg import (
    MatrixFq, rref, rref_with_transform, rank, determinant, inverse, is_invertible, matmul,
    row_span, gl_order, gl_rank, gl_unrank, random_gl, gl_generators, gl_to_permutation,
    permutation_to_gl, format_matrix, parse_matrix, is_prime,
)
