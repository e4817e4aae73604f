"""Tensor-product Chebyshev coefficients on the square [-1, 1]^2.

Coefficients are stored *raw*: ``c[i, j]`` is the plain projection

    c_ij = 4/pi^2 * int_0^pi int_0^pi f(cos tx, cos ty) cos(i tx) cos(j ty) dtx dty

with no halving of the first row or column.  The halving belongs to the
primed double sum and is applied only when a series is evaluated.  Keeping
the storage raw means ``f = 1`` gives ``c[0, 0] == 4`` and ``T_p(x) T_q(y)``
gives 1, 2 or 4 depending on how many of ``p, q`` vanish.

The Gauss-Chebyshev rule at the roots of ``T_n`` is the midpoint rule in
``theta = arccos x``, so no weight function is ever evaluated.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

TargetFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


class EvaluationError(ValueError):
    """A target function produced a non-finite value or failed at a point."""

    def __init__(self, message: str, point: tuple[float, float] | None = None):
        super().__init__(message)
        self.point = point


def chebyshev_nodes(n: int) -> np.ndarray:
    """Roots of ``T_n``, ``cos((2l - 1) pi / (2n))`` for ``l = 1..n``.

    The result is strictly decreasing and symmetric about zero.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return np.cos(chebyshev_angles(int(n)))


def chebyshev_angles(n: int) -> np.ndarray:
    """Angles ``theta_l = (2l - 1) pi / (2n)`` of the Chebyshev roots."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return (2.0 * np.arange(1, n + 1) - 1.0) * np.pi / (2.0 * n)


@dataclass(frozen=True)
class ChebGrid:
    """Tensor grid of Chebyshev roots, ``n_x`` in x by ``n_y`` in y."""

    n_x: int
    n_y: int
    nodes_x: np.ndarray = field(init=False, repr=False, compare=False)
    nodes_y: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes_x", chebyshev_nodes(self.n_x))
        object.__setattr__(self, "nodes_y", chebyshev_nodes(self.n_y))

    @classmethod
    def square(cls, n: int) -> "ChebGrid":
        return cls(n, n)


def eval_T(i: int, x):
    """Chebyshev polynomial ``T_i(x) = cos(i arccos x)`` on ``[-1, 1]``."""
    if int(i) != i or i < 0:
        raise ValueError(f"degree must be a nonnegative integer, got {i!r}")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0):
        raise ValueError("eval_T is defined on [-1, 1] only")
    out = np.cos(int(i) * np.arccos(xa))
    return float(out) if out.ndim == 0 else out


def evaluate_on_grid(f: TargetFunction, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Values ``f(xs[a], ys[b])`` as an array of shape ``(len(xs), len(ys))``.

    ``f`` is first called once with broadcast arrays.  Functions that only
    accept scalars are retried point by point.  Non-finite values raise
    :class:`EvaluationError` naming the first offending node.
    """
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    try:
        with np.errstate(all="ignore"):
            F = np.asarray(f(X, Y), dtype=float)
        if F.shape != X.shape:
            F = np.broadcast_to(F, X.shape).astype(float) if F.ndim == 0 else None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, EvaluationError):
            raise
        F = None
    if F is None:
        F = np.empty(X.shape)
        for idx in np.ndindex(X.shape):
            F[idx] = float(f(float(X[idx]), float(Y[idx])))
    bad = ~np.isfinite(F)
    if bad.any():
        a, b = np.argwhere(bad)[0]
        pt = (float(X[a, b]), float(Y[a, b]))
        raise EvaluationError(f"non-finite value {F[a, b]} at node (x, y) = {pt}", pt)
    return F


@dataclass
class CoeffMatrix:
    """Raw Chebyshev coefficients ``entries[i, j]`` for ``i <= d_x, j <= d_y``.

    ``provenance`` records how the entries were produced, e.g.
    ``{"kind": "quadrature", "n_x": 16, "n_y": 16}`` or
    ``{"kind": "oracle", "oversample": 4, "n": 324}``.
    """

    entries: np.ndarray
    provenance: dict = field(default_factory=lambda: {"kind": "explicit"})

    def __post_init__(self):
        self.entries = np.array(self.entries, dtype=float, ndmin=2)
        if self.entries.ndim != 2:
            raise ValueError("entries must be a 2-D array")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("coefficient entries must be finite")

    @property
    def d_x(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def d_y(self) -> int:
        return self.entries.shape[1] - 1

    def truncated(self, d_x: int, d_y: int) -> "CoeffMatrix":
        if d_x > self.d_x or d_y > self.d_y:
            raise ValueError(f"cannot truncate degree ({self.d_x}, {self.d_y}) to ({d_x}, {d_y})")
        return CoeffMatrix(self.entries[: d_x + 1, : d_y + 1].copy(), dict(self.provenance))

    def __call__(self, x, y):
        return eval_partial_sum(self, x, y)

    # -- serialization -------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "c"])
        for i in range(self.d_x + 1):
            for j in range(self.d_y + 1):
                w.writerow([i, j, format_float(self.entries[i, j])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, provenance: dict | None = None) -> "CoeffMatrix":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty coefficient CSV")
        d_x = max(int(r["i"]) for r in rows)
        d_y = max(int(r["j"]) for r in rows)
        E = np.zeros((d_x + 1, d_y + 1))
        for r in rows:
            E[int(r["i"]), int(r["j"])] = float(r["c"])
        return cls(E, provenance or {"kind": "explicit"})

    def to_dict(self) -> dict:
        return {
            "d_x": self.d_x,
            "d_y": self.d_y,
            "provenance": dict(self.provenance),
            "entries": [[float(v) for v in row] for row in self.entries],
        }

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CoeffMatrix":
        obj = json.loads(text)
        E = np.array(obj["entries"], dtype=float).reshape(obj["d_x"] + 1, obj["d_y"] + 1)
        return cls(E, obj.get("provenance", {"kind": "explicit"}))


def format_float(v: float) -> str:
    """Fixed 17-significant-digit rendering used by every emitted file."""
    return format(float(v), ".17g")


def dumps_json(obj, indent: int = 2) -> str:
    """Deterministic JSON: insertion key order, floats at 17 significant digits.

    Non-finite floats are written as ``null``.
    """

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            items = [pad + enc(v, level + 1) for v in o]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return format_float(o) if np.isfinite(o) else "null"
        return json.dumps(o)

    return enc(obj, 0) + "\n"


def _cos_table(d: int, theta: np.ndarray) -> np.ndarray:
    """``cos(i * theta_l)`` for ``i = 0..d``; rows indexed by degree."""
    return np.cos(np.outer(np.arange(d + 1), theta))


def coeffs_from_values(F: np.ndarray, d_x: int, d_y: int) -> np.ndarray:
    """Raw coefficients from values at the Chebyshev root grid (``F[l_x, l_y]``)."""
    n_x, n_y = F.shape
    Tx = _cos_table(d_x, chebyshev_angles(n_x))
    Ty = _cos_table(d_y, chebyshev_angles(n_y))
    return (4.0 / (n_x * n_y)) * (Tx @ F @ Ty.T)


def compute_coeffs_quadrature(f: TargetFunction, grid: ChebGrid, d_x: int, d_y: int) -> CoeffMatrix:
    """Gauss-Chebyshev estimates ``c~_ij`` for ``i <= d_x``, ``j <= d_y``.

    ``f`` is evaluated once per node; the value table is reused for every
    coefficient.
    """
    if d_x < 0 or d_y < 0:
        raise ValueError("degrees must be nonnegative")
    if d_x >= grid.n_x or d_y >= grid.n_y:
        raise ValueError(
            f"degree ({d_x}, {d_y}) not resolvable on a {grid.n_x}x{grid.n_y} grid; need d < n per axis"
        )
    F = evaluate_on_grid(f, grid.nodes_x, grid.nodes_y)
    E = coeffs_from_values(F, d_x, d_y)
    return CoeffMatrix(E, {"kind": "quadrature", "n_x": grid.n_x, "n_y": grid.n_y})


def oracle_nodes(d_x: int, d_y: int, oversample: int) -> int:
    return oversample * (max(d_x, d_y) + 1) + 64


def exact_coeffs_oracle(f: TargetFunction, d_x: int, d_y: int, oversample: int = 4) -> CoeffMatrix:
    """Heavily oversampled quadrature standing in for the exact integrals."""
    if int(oversample) != oversample or oversample < 2:
        raise ValueError("oversample must be an integer >= 2")
    n = oracle_nodes(d_x, d_y, int(oversample))
    C = compute_coeffs_quadrature(f, ChebGrid(n, n), d_x, d_y)
    C.provenance = {"kind": "oracle", "oversample": int(oversample), "n": n}
    return C


def primed_weights(entries: np.ndarray) -> np.ndarray:
    """Entries scaled for the primed double sum (1/4 at (0,0), 1/2 on the border)."""
    W = np.array(entries, dtype=float, copy=True)
    W[0, :] *= 0.5
    W[:, 0] *= 0.5
    return W


def _clenshaw(coef: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Sum ``coef[k] T_k(x)`` along axis 0 of ``coef``; trailing axes broadcast with ``x``."""
    b1 = np.zeros(np.broadcast_shapes(coef.shape[1:], np.shape(x)))
    b2 = np.zeros_like(b1)
    for k in range(coef.shape[0] - 1, 0, -1):
        b1, b2 = coef[k] + 2.0 * x * b1 - b2, b1
    return coef[0] + x * b1 - b2


def _check_square(x, y):
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(np.abs(xa) > 1.0) or np.any(np.abs(ya) > 1.0):
        raise ValueError("evaluation points must lie in the closed square [-1, 1]^2")
    return np.broadcast_arrays(xa, ya)


def eval_partial_sum(C: CoeffMatrix, x, y):
    """Evaluate the primed double sum of ``C`` at ``(x, y)`` by nested Clenshaw."""
    xa, ya = _check_square(x, y)
    W = primed_weights(C.entries)
    # inner sum over j for every i, then the outer sum over i
    inner = _clenshaw(W.T.reshape(W.shape[1], W.shape[0], *([1] * ya.ndim)), ya)
    out = _clenshaw(inner, xa)
    return float(out) if out.ndim == 0 else out


def eval_partial_sum_naive(C: CoeffMatrix, x, y):
    """Direct double-cosine evaluation; reference path for :func:`eval_partial_sum`."""
    xa, ya = _check_square(x, y)
    W = primed_weights(C.entries)
    tx = np.arccos(xa)[..., None] * np.arange(C.d_x + 1)
    ty = np.arccos(ya)[..., None] * np.arange(C.d_y + 1)
    out = np.einsum("...i,ij,...j->...", np.cos(tx), W, np.cos(ty))
    return float(out) if np.ndim(out) == 0 else out


def l1_integral(g: TargetFunction, m: int = 256) -> float:
    """``int_D |g| dx dy`` by an ``m x m`` tensor Gauss-Legendre rule."""
    if m < 16:
        raise ValueError("m must be at least 16")
    t, w = np.polynomial.legendre.leggauss(m)
    G = evaluate_on_grid(g, t, t)
    return float(w @ np.abs(G) @ w)


def l1_error(f: TargetFunction, C: CoeffMatrix, m: int = 256) -> float:
    """Unweighted L1 distance between ``f`` and the primed partial sum of ``C``."""
    return l1_integral(lambda x, y: np.asarray(f(x, y), dtype=float) - eval_partial_sum(C, x, y), m)


def derivative_coeff(fpartial: TargetFunction, r: int, s: int, i: int, j: int, n: int) -> float:
    """Coefficient ``c^{(r,s)}_{ij}`` of a caller-supplied mixed partial.

    ``r`` and ``s`` only label which partial ``fpartial`` is; the value is the
    ``n x n`` Gauss-Chebyshev projection of ``fpartial`` onto ``T_i T_j``.
    """
    if min(r, s, i, j) < 0:
        raise ValueError("orders and indices must be nonnegative")
    if n <= max(i, j):
        raise ValueError(f"n = {n} must exceed max(i, j) = {max(i, j)}")
    th = chebyshev_angles(n)
    F = evaluate_on_grid(fpartial, np.cos(th), np.cos(th))
    return float((4.0 / (n * n)) * (np.cos(i * th) @ F @ np.cos(j * th)))
