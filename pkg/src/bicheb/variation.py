"""Weighted variation integrals that parameterize every decay bound.

All three integrals have the form ``int_D |g| w dx dy`` with the Chebyshev
weight ``w``.  In ``theta`` coordinates this is a plain double integral over
``[0, pi]^2``, evaluated here by the midpoint rule, i.e. the Gauss-Chebyshev
grid.  The boundary singularity of ``w`` is never touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bounds import SmoothnessClass, VariationBundle
from .core import chebyshev_nodes, evaluate_on_grid

FD_MAX_ORDER = 4


class VariationNotConverged(ArithmeticError):
    """Doubling the grid changed a variation estimate by more than the tolerance."""

    def __init__(self, message: str, estimate: "VariationEstimate"):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class MixedPartialSpec:
    """A callable ``d^(order_x + order_y) f / dx^order_x dy^order_y``."""

    order_x: int
    order_y: int
    eval: Callable
    source: str = "analytic"

    def __call__(self, x, y):
        return self.eval(x, y)


@dataclass(frozen=True)
class VariationEstimate:
    value: float
    value_doubled: float
    n_used: int
    converged: bool

    @property
    def relative_change(self) -> float:
        if self.value == 0.0:
            return 0.0 if self.value_doubled == 0.0 else math.inf
        return abs(self.value_doubled - self.value) / abs(self.value)


def weighted_abs_integral(g: Callable, n: int) -> float:
    """``(pi^2 / n^2) * sum |g|`` over the ``n x n`` Chebyshev root grid."""
    nodes = chebyshev_nodes(n)
    G = evaluate_on_grid(g, nodes, nodes)
    return float(math.pi**2 / n**2 * np.abs(G).sum())


def estimate_variation(g: Callable, n: int = 256, rtol: float = 0.01) -> VariationEstimate:
    if n < 32:
        raise ValueError("variation quadrature needs n >= 32")
    v = weighted_abs_integral(g, n)
    v2 = weighted_abs_integral(g, 2 * n)
    denom = max(abs(v), abs(v2))
    converged = denom == 0.0 or abs(v2 - v) <= rtol * denom
    return VariationEstimate(v, v2, n, converged)


def _checked(spec: MixedPartialSpec, n: int, strict: bool, what: str) -> float:
    est = estimate_variation(spec, n)
    if strict and not est.converged:
        raise VariationNotConverged(
            f"{what}: estimate moved from {est.value:.6g} (n={n}) to {est.value_doubled:.6g} (n={2 * n}); "
            "the weighted variation is likely infinite",
            est,
        )
    return est.value


def vitali_variation(spec: MixedPartialSpec, n: int = 256, strict: bool = True) -> float:
    """``V_{k,l} = int_D |f_{x^(k+1) y^(l+1)}| w dx dy`` for a partial of order ``(k+1, l+1)``."""
    if spec.order_x < 1 or spec.order_y < 1:
        raise ValueError("vitali_variation needs a mixed partial of order (k+1, l+1)")
    return _checked(spec, n, strict, f"V[{spec.order_x - 1},{spec.order_y - 1}]")


def directional_variation(spec: MixedPartialSpec, n: int = 256, axis: str = "x", strict: bool = True) -> float:
    """``V_k[x]`` from ``f_{x^(k+1)}`` (axis ``x``) or ``V_l[y]`` from ``f_{y^(l+1)}``."""
    if axis == "x":
        if spec.order_x < 1 or spec.order_y != 0:
            raise ValueError("axis 'x' needs a partial of order (k+1, 0)")
        label = f"V_{spec.order_x - 1}[x]"
    elif axis == "y":
        if spec.order_y < 1 or spec.order_x != 0:
            raise ValueError("axis 'y' needs a partial of order (0, l+1)")
        label = f"V_{spec.order_y - 1}[y]"
    else:
        raise ValueError("axis must be 'x' or 'y'")
    return _checked(spec, n, strict, label)


def variation_bundle(partial: Callable[[int, int], MixedPartialSpec], cls: SmoothnessClass,
                     n: int = 256, strict: bool = True) -> VariationBundle:
    """All three variations for ``cls`` from a partial-derivative factory."""
    k, l = cls.k, cls.l
    v_kl = vitali_variation(partial(k + 1, l + 1), n, strict)
    v_k = directional_variation(partial(k + 1, 0), n, "x", strict)
    v_l = directional_variation(partial(0, l + 1), n, "y", strict)
    return VariationBundle(v_kl, v_k, v_l, source=f"quadrature(n={n})")


def default_fd_step(total_order: int) -> float:
    """Step balancing O(h^2) truncation against ``eps / h^order`` roundoff.

    Equals 1e-4 up to total order 2 and grows to about 2.5e-3 at order 4.
    """
    return max(1e-4, float(np.finfo(float).eps) ** (1.0 / (total_order + 2)))


def _central_stencil(order: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of the centered ``order``-th difference with spacing ``h``.

    Odd orders use half-integer offsets, so the stencil spans ``order * h``.
    """
    m = np.arange(order + 1)
    offsets = (m - order / 2.0) * h
    weights = np.array([(-1) ** (order - k) * math.comb(order, k) for k in m], dtype=float) / h**order
    return offsets, weights


def _shift_inside(t: np.ndarray, half_width: float) -> np.ndarray:
    return np.clip(t, -1.0 + half_width, 1.0 - half_width)


def finite_difference_partial(f: Callable, order_x: int, order_y: int, h: float | None = None) -> MixedPartialSpec:
    """Mixed partial by a tensor product of centered differences.

    Near the boundary the whole stencil is shifted inward so it stays in the
    square (a one-sided difference).  Total order is capped at 4.  With
    ``h=None`` the step comes from :func:`default_fd_step`.
    """
    if order_x < 0 or order_y < 0:
        raise ValueError("orders must be nonnegative")
    if order_x + order_y > FD_MAX_ORDER:
        raise ValueError(
            f"finite differences are limited to total order {FD_MAX_ORDER}; got {order_x + order_y}"
        )
    if h is None:
        h = default_fd_step(order_x + order_y)
    if not 1e-6 <= h <= 1e-2:
        raise ValueError("h must lie in [1e-6, 1e-2]")
    ox, wx = _central_stencil(order_x, h)
    oy, wy = _central_stencil(order_y, h)

    def fd(x, y):
        x = _shift_inside(np.asarray(x, dtype=float), order_x * h / 2)
        y = _shift_inside(np.asarray(y, dtype=float), order_y * h / 2)
        x, y = np.broadcast_arrays(x, y)
        acc = np.zeros(x.shape)
        for dx, cx in zip(ox, wx):
            for dy, cy in zip(oy, wy):
                acc = acc + cx * cy * np.asarray(f(x + dx, y + dy), dtype=float)
        return acc

    return MixedPartialSpec(order_x, order_y, fd, source=f"finite_difference(h={h:g})")
