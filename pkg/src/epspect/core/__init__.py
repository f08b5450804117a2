"""Numeric substrate: scalars, polynomials, matrices, eigensolvers."""

from .scalars import (
    CLUSTER_RTOL,
    EXTENDED_DPS,
    Precision,
    RootCluster,
    as_fraction,
    cluster_points,
    mode_of,
    principal_sqrt,
    to_double,
    to_extended,
)
from .poly import (
    BivariateSecular,
    ConvergenceError,
    Polynomial,
    PolyRoots,
    discriminant,
    discriminant_in_E,
    poly_roots,
    resultant,
    sylvester_matrix,
)
from .tridiag import (
    DenseMatrix,
    Tridiagonal,
    as_array,
    charpoly_from_parts,
    charpoly_tridiag,
    exact_matmul,
    exact_rank,
)
from .eig import EigResult, eig_dense

__all__ = [
    "CLUSTER_RTOL",
    "EXTENDED_DPS",
    "Precision",
    "RootCluster",
    "as_fraction",
    "cluster_points",
    "mode_of",
    "principal_sqrt",
    "to_double",
    "to_extended",
    "BivariateSecular",
    "ConvergenceError",
    "Polynomial",
    "PolyRoots",
    "discriminant",
    "discriminant_in_E",
    "poly_roots",
    "resultant",
    "sylvester_matrix",
    "DenseMatrix",
    "Tridiagonal",
    "as_array",
    "charpoly_from_parts",
    "charpoly_tridiag",
    "exact_matmul",
    "exact_rank",
    "EigResult",
    "eig_dense",
]
