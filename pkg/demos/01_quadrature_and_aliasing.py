"""
Quadrature coefficients and where aliasing comes from
=====================================================

Coefficients computed on an ``n``-point Chebyshev grid differ from the true
ones.  Every ``T_m`` with ``m = 2kn +- i`` looks exactly like ``+-T_i`` on
the grid, so its coefficient lands on index ``i``.
"""

import numpy as np

from bicheb import ChebGrid, compute_coeffs_quadrature, eval_T, exact_coeffs_oracle
from bicheb.aliasing import alias_residual, fold_indices, reconstruct_quadrature_coeff

# A constant: c00 = 4 under the raw normalization; the partial sum applies
# weight 1/4 at (0, 0), so it evaluates back to 1.
C = compute_coeffs_quadrature(lambda x, y: np.ones_like(x), ChebGrid(8, 8), 7, 7)
print("c00 of f = 1:", C.entries[0, 0], " f(0.3, -0.1) from the series:", C(0.3, -0.1))

# T_16 sampled on 8 nodes is indistinguishable from -T_0
f = lambda x, y: eval_T(16, x) + 0 * y
Cq = compute_coeffs_quadrature(f, ChebGrid(8, 8), 3, 3)
print("quadrature c00 of T_16 on 8 nodes:", round(Cq.entries[0, 0], 12))

# which indices fold onto i = 0 and i = 3?
print("folds onto 0:", fold_indices(0, 8, 2))
print("folds onto 3:", fold_indices(3, 8, 2))

# rebuild the quadrature value from the exact coefficients
exact = exact_coeffs_oracle(f, 32, 32)
print("reconstructed:", reconstruct_quadrature_coeff(exact, 0, 0, 8, 8, 1))

# %%
# For a smooth function the folded coefficients are tiny, and a couple of
# folds are enough to reproduce the quadrature coefficients to 1e-12.
for k_max in (1, 2, 3):
    r = alias_residual(lambda x, y: np.exp(x + y), 15, 15, 16, 16, k_max)
    print(f"exp(x+y), k_max = {k_max}: residual {r:.2e}")
