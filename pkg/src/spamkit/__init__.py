"""Sparse pseudospectral approximation on Smolyak grids.

The main entry points are :func:`spam_expansion` (combine tensor
pseudospectral coefficients over a Smolyak scheme), the direct
sparse-quadrature baseline :func:`direct_sparse_expansion`, and the
estimator :class:`SparsePseudospectralRegressor`.
"""

from .exceptions import (
    DataValidationError,
    EvaluationError,
    InvalidArgumentError,
    NumericFailureError,
    ResourceLimitError,
    SpamError,
)
from .orthopoly import (
    LEGENDRE,
    QuadratureRule1D,
    RecurrenceCoefficients,
    basis_values,
    gauss_rule,
    jacobi_matrix,
    legendre_recurrence,
    pseudospectral_1d,
)
from .tensor import SpectralExpansion, tensor_grid, tensor_pseudospectral, tensor_quadrature
from .smolyak import GrowthRule, SmolyakScheme, SparseGridRule, build_sparse_rule, sparse_quadrature
from .spam import (
    GramMatrix,
    SpamExpansion,
    direct_sparse_expansion,
    expansion_mean,
    expansion_variance,
    gram_matrix,
    spam_expansion,
    union_basis,
)
from .experiments import level_sweep, test_function, truth_expansion
from .estimator import SparsePseudospectralRegressor

__version__ = "0.1.0"

__all__ = [
    "DataValidationError",
    "EvaluationError",
    "InvalidArgumentError",
    "NumericFailureError",
    "ResourceLimitError",
    "SpamError",
    "LEGENDRE",
    "QuadratureRule1D",
    "RecurrenceCoefficients",
    "basis_values",
    "gauss_rule",
    "jacobi_matrix",
    "legendre_recurrence",
    "pseudospectral_1d",
    "SpectralExpansion",
    "tensor_grid",
    "tensor_pseudospectral",
    "tensor_quadrature",
    "GrowthRule",
    "SmolyakScheme",
    "SparseGridRule",
    "build_sparse_rule",
    "sparse_quadrature",
    "GramMatrix",
    "SpamExpansion",
    "direct_sparse_expansion",
    "expansion_mean",
    "expansion_variance",
    "gram_matrix",
    "spam_expansion",
    "union_basis",
    "level_sweep",
    "test_function",
    "truth_expansion",
    "SparsePseudospectralRegressor",
]
