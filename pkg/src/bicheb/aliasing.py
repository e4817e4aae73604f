"""Exact versus quadrature coefficients: the bivariate aliasing identity.

At the roots of ``T_n``, ``T_{2kn +- i}`` takes the values ``(-1)^k T_i``.
Quadrature coefficients therefore pick up every exact coefficient whose
index folds onto ``(i, j)``:

    c~_ij = c_ij + sum_kx (-1)^kx (c_{2kx nx - i, j} + c_{2kx nx + i, j})
                 + sum_ky (-1)^ky (c_{i, 2ky ny - j} + c_{i, 2ky ny + j})
                 + sum_kx sum_ky (-1)^(kx+ky) (four cross terms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import SmoothnessClass, VariationBundle, coeff_bound_directional, _axis_gamma
from .core import ChebGrid, CoeffMatrix, TargetFunction, compute_coeffs_quadrature, exact_coeffs_oracle

K_MAX_CAP = 8
#: Bound on the first dropped folded coefficient below which folding stops.
K_MAX_THRESHOLD = 1e-3 * 1e-12


def fold_indices(i: int, n: int, k_max: int) -> list[tuple[int, int]]:
    """``[((-1)^k, 2kn - i), ((-1)^k, 2kn + i)]`` for ``k = 1..k_max``."""
    if not 0 <= i < n:
        raise ValueError(f"index {i} is not resolvable with n = {n}; need 0 <= i < n")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    out = []
    for k in range(1, k_max + 1):
        sign = -1 if k % 2 else 1
        out += [(sign, 2 * k * n - i), (sign, 2 * k * n + i)]
    return out


@dataclass(frozen=True)
class AliasExpansion:
    """Signed index pairs that fold onto ``base`` with truncation ``k_max``."""

    base: tuple[int, int]
    x_terms: tuple[tuple[int, int], ...]
    y_terms: tuple[tuple[int, int], ...]
    cross_terms: tuple[tuple[int, int, int], ...]
    k_max: int

    @classmethod
    def build(cls, i: int, j: int, n_x: int, n_y: int, k_max: int) -> "AliasExpansion":
        fx = fold_indices(i, n_x, k_max)
        fy = fold_indices(j, n_y, k_max)
        cross = tuple((sx * sy, a, b) for sx, a in fx for sy, b in fy)
        return cls((i, j), tuple(fx), tuple(fy), cross, k_max)

    def terms(self):
        """All ``(sign, i', j')`` contributions, base term first."""
        i, j = self.base
        yield 1, i, j
        for s, a in self.x_terms:
            yield s, a, j
        for s, b in self.y_terms:
            yield s, i, b
        yield from self.cross_terms


def reconstruct_quadrature_coeff(C_exact: CoeffMatrix, i: int, j: int, n_x: int, n_y: int, k_max: int) -> float:
    """``c~_ij`` predicted from exact coefficients, fold sums truncated at ``k_max``."""
    need_x = 2 * k_max * n_x + i
    need_y = 2 * k_max * n_y + j
    if C_exact.d_x < need_x or C_exact.d_y < need_y:
        missing = (need_x, j) if C_exact.d_x < need_x else (i, need_y)
        raise ValueError(
            f"exact coefficients cover degree ({C_exact.d_x}, {C_exact.d_y}); "
            f"index {missing} is needed (degree ({need_x}, {need_y}))"
        )
    E = C_exact.entries
    # fsum is correctly rounded, hence independent of term order (exact x/y symmetry)
    return math.fsum(s * E[a, b] for s, a, b in AliasExpansion.build(i, j, n_x, n_y, k_max).terms())


def extended_degree(n: int, d: int, k_max: int) -> int:
    return 2 * k_max * n + d


def alias_residual_matrix(f: TargetFunction, d_x: int, d_y: int, n_x: int, n_y: int, k_max: int,
                          oversample: int = 4) -> np.ndarray:
    """``|reconstruct - c~|`` on the ``(d_x+1) x (d_y+1)`` grid."""
    if d_x >= n_x or d_y >= n_y:
        raise ValueError(f"degrees ({d_x}, {d_y}) must be below node counts ({n_x}, {n_y})")
    Cq = compute_coeffs_quadrature(f, ChebGrid(n_x, n_y), d_x, d_y)
    Ce = exact_coeffs_oracle(
        f, extended_degree(n_x, d_x, k_max), extended_degree(n_y, d_y, k_max), oversample
    )
    R = np.empty((d_x + 1, d_y + 1))
    for i in range(d_x + 1):
        for j in range(d_y + 1):
            R[i, j] = abs(reconstruct_quadrature_coeff(Ce, i, j, n_x, n_y, k_max) - Cq.entries[i, j])
    return R


def alias_residual(f: TargetFunction, d_x: int, d_y: int, n_x: int, n_y: int, k_max: int,
                   oversample: int = 4) -> float:
    """Largest gap between reconstructed and directly computed ``c~_ij``."""
    return float(alias_residual_matrix(f, d_x, d_y, n_x, n_y, k_max, oversample).max())


# -- predicted size of the dropped folds -----------------------------------

_SERIES_TERMS = 100_000


def _fold_series(order: int, idx: int, n: int, k_lo: int, k_hi: int) -> float:
    """``sum_{k=k_lo}^{k_hi} Gamma(2kn - idx) + Gamma(2kn + idx)``; ``k_hi`` may be ``inf``.

    An infinite upper limit is handled by summing ``_SERIES_TERMS`` terms and
    adding an integral majorant of the remainder (``Gamma`` is decreasing).
    The series diverges for ``order == 0``.
    """
    if k_hi < k_lo:
        return 0.0
    if math.isinf(k_hi) and order == 0:
        return math.inf
    top = k_lo + _SERIES_TERMS - 1 if math.isinf(k_hi) else int(k_hi)
    ks = np.arange(k_lo, top + 1, dtype=float)
    total = 0.0
    p = order // 2
    for m in (2 * ks * n - idx, 2 * ks * n + idx):
        if order % 2 == 0:
            offs = np.arange(-p, p + 1) * 2.0
        else:
            offs = np.arange(-p, p + 2) * 2.0 - 1.0
        fac = m[:, None] + offs[None, :]
        if np.any(fac <= 0):
            return math.inf
        total += float(np.sum(1.0 / np.prod(fac, axis=1)))
    if math.isinf(k_hi):
        # Gamma(eta) <= (eta - w)^-(order+1) with w the most negative offset.
        w = 2 * p + (order % 2)
        base = 2.0 * top * n - idx - w
        total += 2.0 / (2.0 * n * order * base**order)
    return total


def predicted_tail_bound(cls: SmoothnessClass, bundle: VariationBundle, i: int, j: int,
                         n_x: int, n_y: int, k_max: int) -> float:
    """Upper bound on the folds dropped at ``(i, j)`` by truncating at ``k_max``.

    Uses the joint bound on cross terms and, on single-axis folds, the
    smaller of the joint and directional bounds.  Returns ``inf`` when the
    dropped series cannot be bounded (order 0 on a folded axis, or a needed
    variation is unknown).
    """
    k, l = cls.k, cls.l
    if n_x <= k or n_y <= l:
        return math.inf
    c = 4.0 / math.pi**2
    sx_all = _fold_series(k, i, n_x, 1, math.inf)
    sy_all = _fold_series(l, j, n_y, 1, math.inf)
    sx_kept = _fold_series(k, i, n_x, 1, k_max)
    sy_kept = _fold_series(l, j, n_y, 1, k_max)

    def per_axis_const(v_dir, other_order, other_idx):
        consts = []
        if v_dir is not None:
            consts.append(c * v_dir)
        if other_idx > other_order:
            consts.append(c * bundle.v_kl * _axis_gamma(other_order, other_idx))
        return min(consts) if consts else math.inf

    def dropped(s_all, s_kept):
        return s_all - s_kept if math.isfinite(s_all) else math.inf

    x_only = per_axis_const(bundle.v_k, l, j) * dropped(sx_all, sx_kept)
    y_only = per_axis_const(bundle.v_l, k, i) * dropped(sy_all, sy_kept)
    if math.isfinite(sx_all) and math.isfinite(sy_all):
        cross = c * bundle.v_kl * (sx_all * sy_all - sx_kept * sy_kept)
    else:
        cross = math.inf
    return x_only + y_only + cross


def choose_k_max(cls: SmoothnessClass, bundle: VariationBundle, n_x: int, n_y: int, d_x: int, d_y: int) -> int:
    """Smallest ``k_max`` whose first dropped folded coefficient is certifiably negligible.

    The first dropped fold on each axis sits at index ``2 (k_max + 1) n - d``;
    its directional bound must fall below :data:`K_MAX_THRESHOLD`.  Capped at
    :data:`K_MAX_CAP`.
    """
    for K in range(1, K_MAX_CAP + 1):
        ok = True
        for order, v, n, d in ((cls.k, bundle.v_k, n_x, d_x), (cls.l, bundle.v_l, n_y, d_y)):
            v = bundle.v_kl if v is None else v
            idx = 2 * (K + 1) * n - d
            if idx <= order or coeff_bound_directional(order, v, idx) >= K_MAX_THRESHOLD:
                ok = False
        if ok:
            return K
    return K_MAX_CAP
