"""Zeroing coefficients whose certified size is below a threshold.

Every dropped entry costs at most ``4 * |c_ij|`` in L1, since
``|T_i T_j| <= 1`` on a square of area 4 and the primed weights are at most
one.  The L1 budget of a thresholding is four times the sum of the bounds
(or magnitudes) of the dropped set.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .bounds import DOMAIN_AREA, SmoothnessClass, VariationBundle, bound_grid
from .core import CoeffMatrix, TargetFunction, dumps_json, eval_partial_sum, format_float, l1_integral


@dataclass
class SparseCoeffs:
    kept: list[tuple[int, int, float]]
    dropped: list[tuple[int, int, float]]
    dropped_l1_budget: float
    shape: tuple[int, int]
    origin: dict = field(default_factory=dict)
    strategy: str = ""
    epsilon: float = 0.0

    @property
    def kept_set(self) -> set[tuple[int, int]]:
        return {(i, j) for i, j, _ in self.kept}

    def _matrix(self, items) -> CoeffMatrix:
        E = np.zeros(self.shape)
        for i, j, v in items:
            E[i, j] = v
        return CoeffMatrix(E, dict(self.origin))

    def to_matrix(self) -> CoeffMatrix:
        return self._matrix(self.kept)

    def dropped_matrix(self) -> CoeffMatrix:
        return self._matrix(self.dropped)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "c"])
        for i, j, v in self.kept:
            w.writerow([i, j, format_float(v)])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {
            "strategy": self.strategy,
            "epsilon": self.epsilon,
            "d_x": self.shape[0] - 1,
            "d_y": self.shape[1] - 1,
            "kept_count": len(self.kept),
            "total_count": self.shape[0] * self.shape[1],
            "dropped_l1_budget": self.dropped_l1_budget,
            "origin": self.origin,
        }


def _partition(C: CoeffMatrix, drop: np.ndarray, cost: np.ndarray, strategy: str, epsilon: float) -> SparseCoeffs:
    kept, dropped = [], []
    for i in range(C.d_x + 1):
        for j in range(C.d_y + 1):
            item = (i, j, float(C.entries[i, j]))
            (dropped if drop[i, j] else kept).append(item)
    budget = DOMAIN_AREA * float(cost[drop].sum())
    return SparseCoeffs(kept, dropped, budget, C.entries.shape, dict(C.provenance), strategy, epsilon)


def threshold_by_bound(C: CoeffMatrix, cls: SmoothnessClass, bundle: VariationBundle, epsilon: float) -> SparseCoeffs:
    """Drop entries whose smallest applicable decay bound is below ``epsilon``.

    Entries with no applicable bound are always kept.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    B = bound_grid(cls, bundle, C.d_x, C.d_y)["min"]
    drop = np.isfinite(B) & (B < epsilon)
    return _partition(C, drop, np.where(drop, B, 0.0), "bound", epsilon)


def threshold_by_magnitude(C: CoeffMatrix, epsilon: float) -> SparseCoeffs:
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    A = np.abs(C.entries)
    drop = A < epsilon
    return _partition(C, drop, A, "magnitude", epsilon)


def compression_report(S: SparseCoeffs, f: TargetFunction | None = None, m: int = 256) -> dict:
    """Measured L1 cost of a thresholding next to its budget.

    ``sound`` records whether the dense-vs-sparse distance stays within the
    budget (relative slack 1e-6 for the quadrature).
    """
    dropped = S.dropped_matrix()
    vs_dense = l1_integral(lambda x, y: eval_partial_sum(dropped, x, y), m) if S.dropped else 0.0
    out = {
        "kept_count": len(S.kept),
        "total_count": S.shape[0] * S.shape[1],
        "budget": S.dropped_l1_budget,
        "measured_l1_vs_dense": vs_dense,
        "measured_l1_vs_f": None,
        "sound": bool(vs_dense <= S.dropped_l1_budget * (1.0 + 1e-6) + 1e-15),
    }
    if f is not None:
        sparse = S.to_matrix()
        out["measured_l1_vs_f"] = l1_integral(
            lambda x, y: np.asarray(f(x, y), dtype=float) - eval_partial_sum(sparse, x, y), m
        )
    return out


def report_json(S: SparseCoeffs, report: dict) -> str:
    return dumps_json({"schema": 1, **S.sidecar(), "report": report})
