"""Bivariate Chebyshev approximation with certified coefficient decay.

Quadrature and oracle coefficients live in :mod:`bicheb.core`; decay and L1
bounds in :mod:`bicheb.bounds`; weighted variations in
:mod:`bicheb.variation`; the aliasing identity in :mod:`bicheb.aliasing`;
bound-guided thresholding in :mod:`bicheb.compression`.
"""

__version__ = "0.1.0"

from .core import (
    ChebGrid,
    CoeffMatrix,
    EvaluationError,
    chebyshev_nodes,
    compute_coeffs_quadrature,
    derivative_coeff,
    eval_partial_sum,
    eval_T,
    exact_coeffs_oracle,
    l1_error,
)
from .bounds import (
    BoundReport,
    SmoothnessClass,
    VariationBundle,
    audit_decay,
    coeff_bound,
    coeff_bound_directional,
    gamma,
    l1_bound_exact_partial,
    l1_bound_quadrature_partial,
    pi_fn,
    pi_upper,
)
from .variation import (
    MixedPartialSpec,
    VariationNotConverged,
    directional_variation,
    finite_difference_partial,
    vitali_variation,
)
from .aliasing import alias_residual, fold_indices, reconstruct_quadrature_coeff
from .compression import SparseCoeffs, compression_report, threshold_by_bound, threshold_by_magnitude
from .corpus import CorpusEntry, builtin_corpus, get_entry
from .expr import ParseError, ast_to_function, parse_expression

__all__ = [name for name in dir() if not name.startswith("_")]
