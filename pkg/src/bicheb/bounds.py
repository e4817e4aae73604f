"""Decay bounds for bivariate Chebyshev coefficients and L1 truncation bounds.

A function whose mixed partial ``f_{x^k y^l}`` has finite weighted Vitali
variation

    V_kl = int_D |f_{x^(k+1) y^(l+1)}| w(x, y) dx dy

has coefficients bounded by ``4 V_kl / pi^2`` times one reciprocal product
per axis.  The product is picked by the parity of the smoothness order:
``k = 2s`` uses ``gamma(0, 0, s, i)``, ``k = 2s + 1`` uses
``gamma(1, -1, s, i)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import CoeffMatrix, dumps_json, format_float

#: ``int_D dx dy``.  Links the tail sum of coefficient bounds to the L1 bound:
#: ``l1_bound_exact_partial == DOMAIN_AREA * sum_{i>d_x, j>d_y} coeff_bound``.
DOMAIN_AREA = 4.0


@dataclass(frozen=True)
class SmoothnessClass:
    """Orders ``(k, l)`` with ``f_{x^k y^l}`` of bounded Vitali variation."""

    k: int
    l: int

    def __post_init__(self):
        if int(self.k) != self.k or int(self.l) != self.l or self.k < 0 or self.l < 0:
            raise ValueError(f"smoothness orders must be nonnegative integers, got ({self.k}, {self.l})")

    @property
    def s(self) -> int:
        return self.k // 2

    @property
    def r(self) -> int:
        return self.l // 2


@dataclass(frozen=True)
class VariationBundle:
    """Weighted variations ``V_{k,l}``, ``V_k[x]`` and ``V_l[y]``.

    Directional values may be ``None`` when unknown; the corresponding
    directional bounds are then simply not applied.
    """

    v_kl: float
    v_k: float | None = None
    v_l: float | None = None
    source: str = "unspecified"

    def __post_init__(self):
        for name in ("v_kl", "v_k", "v_l"):
            v = getattr(self, name)
            if v is not None and (not math.isfinite(v) or v < 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")

    @property
    def v_star(self) -> float:
        return max(v for v in (self.v_kl, self.v_k, self.v_l) if v is not None)

    def to_dict(self) -> dict:
        return {"v_kl": self.v_kl, "v_k": self.v_k, "v_l": self.v_l, "v_star": self.v_star, "source": self.source}


def _reciprocal_product(factors) -> float:
    factors = list(factors)
    if any(not (f > 0) for f in factors):
        raise ValueError(f"non-positive factor in product {factors}; index outside the bound's validity range")
    prod = 1.0
    for f in factors:
        prod *= f
    return 1.0 / prod


def gamma(alpha: int, beta: int, p: int, eta: float) -> float:
    """``1 / prod_{n=-p}^{p+alpha} (eta + 2n + beta)``."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    return _reciprocal_product(eta + 2 * n + beta for n in range(-p, p + alpha + 1))


def _axis_gamma(order: int, idx: float) -> float:
    p = order // 2
    return gamma(0, 0, p, idx) if order % 2 == 0 else gamma(1, -1, p, idx)


def coeff_bound(cls: SmoothnessClass, v_kl: float, i: int, j: int) -> float:
    """Bound on ``|c_ij|`` for ``i >= k + 1`` and ``j >= l + 1``."""
    if i <= cls.k or j <= cls.l:
        raise ValueError(f"coeff_bound needs i >= {cls.k + 1} and j >= {cls.l + 1}, got ({i}, {j})")
    return 4.0 * v_kl / math.pi**2 * _axis_gamma(cls.k, i) * _axis_gamma(cls.l, j)


def coeff_bound_directional(order: int, v: float, idx: int, axis: str = "x") -> float:
    """One-axis bound ``|c_ij| <= 4 v / pi^2 * Gamma(idx)``, valid for every index on the other axis."""
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    if idx <= order:
        raise ValueError(f"directional bound along {axis} needs index >= {order + 1}, got {idx}")
    return 4.0 * v / math.pi**2 * _axis_gamma(order, idx)


def pi_fn(alpha: int, p: int, nstar: float) -> float:
    """Two-term telescoped tail ``Pi_alpha[p](n*)``."""
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    if p < 0:
        raise ValueError("p must be nonnegative")
    if (p, alpha) == (0, 1):
        raise ValueError("Pi_1[0] is an empty product; it only arises for order 0, which is excluded")
    ms = range(-p, p - alpha + 1)
    return _reciprocal_product(nstar + 2 * m + alpha for m in ms) + _reciprocal_product(
        nstar + 2 * m + alpha + 1 for m in ms
    )


def pi_upper(alpha: int, p: int, nstar: float) -> float:
    """Closed-form majorant ``2 / (n* - 2p + alpha)^(2p - alpha + 1)`` of :func:`pi_fn`."""
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    base = nstar - 2 * p + alpha
    if not base > 0:
        raise ValueError(f"pi_upper needs n* > 2p - alpha, got n* = {nstar}")
    return 2.0 / base ** (2 * p - alpha + 1)


def _axis_pi(order: int, d: float) -> float:
    p = order // 2
    return pi_fn(1, p, d) if order % 2 == 0 else pi_fn(0, p, d)


def l1_bound_exact_partial(cls: SmoothnessClass, v_kl: float, d_x: float, d_y: float) -> float:
    """L1 bound for the partial sum with exact coefficients; ``k, l >= 1``."""
    if cls.k < 1 or cls.l < 1:
        raise ValueError("the exact-coefficient L1 bound needs k >= 1 and l >= 1")
    if d_x < cls.k or d_y < cls.l:
        raise ValueError(f"degrees ({d_x}, {d_y}) must be at least the smoothness orders ({cls.k}, {cls.l})")
    return 4.0 * v_kl / (cls.k * cls.l * math.pi**2) * _axis_pi(cls.k, d_x) * _axis_pi(cls.l, d_y)


def tail_sum_closed_form(cls: SmoothnessClass, v_kl: float, d_x: int, d_y: int, n_max: float = math.inf) -> float:
    """``sum_{i=d_x+1}^{n_max} sum_{j=d_y+1}^{n_max} coeff_bound`` in closed form.

    Each axis telescopes to ``(Pi(d) - Pi(n_max)) / (2 * order)``.
    """
    if cls.k < 1 or cls.l < 1:
        raise ValueError("telescoping needs k >= 1 and l >= 1")

    def axis(order, d):
        top = 0.0 if math.isinf(n_max) else _axis_pi(order, n_max)
        return (_axis_pi(order, d) - top) / (2 * order)

    return 4.0 * v_kl / math.pi**2 * axis(cls.k, d_x) * axis(cls.l, d_y)


def l1_bound_quadrature_partial(
    cls: SmoothnessClass, bundle: VariationBundle, d_x: int, d_y: int, n_x: int, n_y: int
) -> float:
    """L1 bound for the partial sum built from quadrature coefficients."""
    k, l = cls.k, cls.l
    problems = []
    if k < 1 or l < 1:
        problems.append(f"k, l >= 1 required (got k={k}, l={l})")
    if n_x - 1 < k:
        problems.append(f"n_x - 1 >= k violated (n_x={n_x}, k={k})")
    if n_y - 1 < l:
        problems.append(f"n_y - 1 >= l violated (n_y={n_y}, l={l})")
    if not k <= d_x < n_x:
        problems.append(f"k <= d_x < n_x violated (k={k}, d_x={d_x}, n_x={n_x})")
    if not l <= d_y < n_y:
        problems.append(f"l <= d_y < n_y violated (l={l}, d_y={d_y}, n_y={n_y})")
    if problems:
        raise ValueError("; ".join(problems))
    gx = (d_x - k + 1) ** k
    gy = (d_y - l + 1) ** l
    inner = 4.0 / (k * l * gx * gy) + 2.0 * (d_y + 1) / (k * gx) + 2.0 * (d_x + 1) / (l * gy)
    return 8.0 * bundle.v_star / math.pi**2 * inner


def bound_grid(cls: SmoothnessClass, bundle: VariationBundle, d_x: int, d_y: int) -> dict[str, np.ndarray]:
    """Per-entry bounds on the ``(d_x+1) x (d_y+1)`` index grid.

    Returns arrays ``joint``, ``x`` and ``y`` (``inf`` where a bound does not
    apply) plus ``min``, their entrywise minimum.
    """
    shape = (d_x + 1, d_y + 1)
    joint = np.full(shape, np.inf)
    bx = np.full(shape, np.inf)
    by = np.full(shape, np.inf)
    gx = np.array([_axis_gamma(cls.k, i) if i > cls.k else np.inf for i in range(d_x + 1)])
    gy = np.array([_axis_gamma(cls.l, j) if j > cls.l else np.inf for j in range(d_y + 1)])
    ix, jy = gx < np.inf, gy < np.inf
    c = 4.0 / math.pi**2
    joint[np.ix_(ix, jy)] = c * bundle.v_kl * np.outer(gx[ix], gy[jy])
    if bundle.v_k is not None:
        bx[ix, :] = c * bundle.v_k * gx[ix][:, None]
    if bundle.v_l is not None:
        by[:, jy] = c * bundle.v_l * gy[jy][None, :]
    return {"joint": joint, "x": bx, "y": by, "min": np.minimum(np.minimum(joint, bx), by)}


@dataclass
class BoundReport:
    """Outcome of :func:`audit_decay`."""

    cls: SmoothnessClass
    bundle: VariationBundle
    bounds: np.ndarray
    abs_c: np.ndarray
    violations: list[dict] = field(default_factory=list)
    max_ratio: float = 0.0
    argmax: tuple[int, int] | None = None
    max_ratio_by_kind: dict[str, float] = field(default_factory=dict)
    tol: float = 1e-9

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "class": {"k": self.cls.k, "l": self.cls.l},
            "variations": self.bundle.to_dict(),
            "range": {"i_max": self.bounds.shape[0] - 1, "j_max": self.bounds.shape[1] - 1},
            "tol": self.tol,
            "violations": self.violations,
            "max_ratio": self.max_ratio,
            "argmax": list(self.argmax) if self.argmax else None,
            "max_ratio_by_kind": self.max_ratio_by_kind,
        }

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    def grid_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "bound", "abs_c", "ratio"])
        for i in range(self.bounds.shape[0]):
            for j in range(self.bounds.shape[1]):
                b = self.bounds[i, j]
                if not np.isfinite(b):
                    continue
                ratio = self.abs_c[i, j] / b if b > 0 else (0.0 if self.abs_c[i, j] == 0 else math.inf)
                w.writerow([i, j, format_float(b), format_float(self.abs_c[i, j]), format_float(ratio)])
        return buf.getvalue()


def audit_decay(
    C: CoeffMatrix, cls: SmoothnessClass, bundle: VariationBundle, tol: float = 1e-9, atol: float = 1e-14
) -> BoundReport:
    """Check every coefficient of ``C`` against each applicable bound.

    ``C`` should hold (oracle approximations of) exact coefficients.  An entry
    is a violation when ``|c| > bound * (1 + tol) + atol``; ``atol`` only
    absorbs floating-point noise on entries whose bound is zero.
    """
    grids = bound_grid(cls, bundle, C.d_x, C.d_y)
    A = np.abs(C.entries)
    report = BoundReport(cls, bundle, grids["min"], A, tol=tol)
    best = (-1.0, None)
    for kind in ("joint", "x", "y"):
        B = grids[kind]
        mask = np.isfinite(B)
        if not mask.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            R = np.where(mask & (B > 0), A / np.where(B > 0, B, 1.0), 0.0)
        kmax = float(R.max())
        report.max_ratio_by_kind[kind] = kmax
        if kmax > best[0]:
            a, b = np.unravel_index(np.argmax(R), R.shape)
            best = (kmax, (int(a), int(b)))
        bad = mask & (A > B * (1.0 + tol) + atol)
        for a, b in np.argwhere(bad):
            report.violations.append(
                {"i": int(a), "j": int(b), "kind": kind, "abs_c": float(A[a, b]), "bound": float(B[a, b])}
            )
    report.max_ratio = max(best[0], 0.0)
    report.argmax = best[1]
    report.violations.sort(key=lambda v: (v["i"], v["j"], v["kind"]))
    return report
