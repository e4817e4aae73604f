"""Built-in test functions with known smoothness and variation values.

Most entries are tensor products ``u(x) v(y)``; their mixed partials are
products of one-dimensional derivatives.  A factor such as ``|t|`` has
classical derivatives only up to order one.  Past that the derivative is a
point mass, and requesting it raises :class:`SingularPartialError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bounds import SmoothnessClass, VariationBundle
from .variation import MixedPartialSpec


class SingularPartialError(ArithmeticError):
    """The requested partial is a measure, not a function; its weighted variation is not finite."""


@dataclass(frozen=True)
class Factor:
    """A function of one variable with its classical derivatives ``derivs[0..]``.

    ``smooth`` factors repeat ``derivs`` cyclically (``cyclic=True``) or vanish
    past the list; nonsmooth factors raise past the list.
    """

    name: str
    derivs: Sequence[Callable]
    smooth: bool = True
    cyclic: bool = False

    def derivative(self, order: int) -> Callable:
        if order < len(self.derivs):
            return self.derivs[order]
        if self.cyclic:
            return self.derivs[order % len(self.derivs)]
        if self.smooth:
            return lambda t: np.zeros_like(np.asarray(t, dtype=float))
        raise SingularPartialError(
            f"derivative of order {order} of {self.name} is singular (a point mass); "
            "its weighted variation is not a finite integral"
        )


def _sgn(t):
    return np.sign(t)  # sign(0) = 0


def _abs_shift(a: float) -> Factor:
    return Factor(f"|t-{a:g}|", [lambda t: np.abs(t - a), lambda t: _sgn(t - a)], smooth=False)


ABS = _abs_shift(0.0)
ABS_CUBED = Factor(
    "|t|^3",
    [lambda t: np.abs(t) ** 3, lambda t: 3.0 * t * np.abs(t), lambda t: 6.0 * np.abs(t), lambda t: 6.0 * _sgn(t)],
    smooth=False,
)
ONE = Factor("1", [lambda t: np.ones_like(np.asarray(t, dtype=float))])
LINEAR = Factor("t", [lambda t: np.asarray(t, dtype=float), lambda t: np.ones_like(np.asarray(t, dtype=float))])
CHEB2 = Factor("T_2", [lambda t: 2.0 * t**2 - 1.0, lambda t: 4.0 * t, lambda t: 4.0 + 0.0 * t])
CHEB3 = Factor(
    "T_3",
    [lambda t: 4.0 * t**3 - 3.0 * t, lambda t: 12.0 * t**2 - 3.0, lambda t: 24.0 * t, lambda t: 24.0 + 0.0 * t],
)
EXP = Factor("exp", [np.exp], cyclic=True)
SQRT_EDGE = Factor(
    "sqrt(1-t^2)",
    [lambda t: np.sqrt(1.0 - t**2), lambda t: -t / np.sqrt(1.0 - t**2)],
    smooth=False,
)


@dataclass
class CorpusEntry:
    """A test function and everything needed to audit it.

    ``tail_certificate`` is an optional (class, variations) pair with order at
    least one on both axes, used to bound the dropped folds of the aliasing
    identity.  ``poly_degree`` is set for polynomial entries.
    """

    name: str
    f: Callable
    cls: SmoothnessClass
    partial_fn: Callable[[int, int], Callable] | None = None
    partials: dict = field(default_factory=dict)
    analytic_variations: VariationBundle | None = None
    tail_certificate: tuple[SmoothnessClass, VariationBundle] | None = None
    poly_degree: tuple[int, int] | None = None
    smooth: bool = False
    notes: str = ""

    def has_partial(self, order_x: int, order_y: int) -> bool:
        if (order_x, order_y) in self.partials:
            return True
        if self.partial_fn is None:
            return False
        try:
            self.partial_fn(order_x, order_y)
        except (SingularPartialError, KeyError):
            return False
        return True

    def partial(self, order_x: int, order_y: int) -> MixedPartialSpec:
        """Analytic mixed partial; raises :class:`SingularPartialError` or ``KeyError``."""
        if (order_x, order_y) in self.partials:
            fn = self.partials[(order_x, order_y)]
        elif self.partial_fn is not None:
            fn = self.partial_fn(order_x, order_y)
        else:
            raise KeyError(f"{self.name} has no analytic partial of order ({order_x}, {order_y})")
        return MixedPartialSpec(order_x, order_y, fn, "analytic")

    def variations_for(self, cls: SmoothnessClass) -> VariationBundle | None:
        if self.analytic_variations is not None and cls == self.cls:
            return self.analytic_variations
        if self.tail_certificate is not None and cls == self.tail_certificate[0]:
            return self.tail_certificate[1]
        return None

    def metadata(self) -> dict:
        av = self.analytic_variations
        return {
            "name": self.name,
            "class": {"k": self.cls.k, "l": self.cls.l},
            "analytic_variations": av.to_dict() if av else None,
            "poly_degree": list(self.poly_degree) if self.poly_degree else None,
            "smooth": self.smooth,
            "notes": self.notes,
        }


def _tensor(u: Factor, v: Factor):
    def f(x, y):
        return u.derivs[0](x) * v.derivs[0](y)

    def partial_fn(ox, oy):
        du, dv = u.derivative(ox), v.derivative(oy)
        return lambda x, y: du(x) * dv(y)

    return f, partial_fn


def _abs_weighted_mean(a: float) -> float:
    """``int_0^pi |cos t + a| dt`` for ``|a| < 1``."""
    t0 = math.acos(-a)
    return 2.0 * math.sqrt(1.0 - a * a) + 2.0 * a * t0 - a * math.pi


def _entry(name, u, v, cls, **kw) -> CorpusEntry:
    f, pfn = _tensor(u, v)
    return CorpusEntry(name, f, cls, partial_fn=pfn, **kw)


def _runge():
    def f(x, y):
        return 1.0 / (1.0 + 25.0 * x**2 + 25.0 * y**2)

    def D(x, y):
        return 1.0 + 25.0 * x**2 + 25.0 * y**2

    partials = {
        (0, 0): f,
        (1, 0): lambda x, y: -50.0 * x / D(x, y) ** 2,
        (0, 1): lambda x, y: -50.0 * y / D(x, y) ** 2,
        (1, 1): lambda x, y: 5000.0 * x * y / D(x, y) ** 3,
    }
    return CorpusEntry(
        "runge", f, SmoothnessClass(0, 0), partials=partials, smooth=True,
        notes="analytic in a neighbourhood of the square; poles at 25(x^2+y^2) = -1; no closed-form variations",
    )


def builtin_corpus() -> list[CorpusEntry]:
    pi2 = math.pi**2
    i0 = float(np.i0(1.0))
    v_exp = (math.pi * i0) ** 2  # int_D exp(x+y) w = (pi I_0(1))^2
    cheb3_abs = math.pi + 6.0 * math.sqrt(3.0)  # int_0^pi |T_3'(cos t)| dt
    m_x = _abs_weighted_mean(-0.3)  # int_0^pi |cos t - 0.3| dt
    m_y = _abs_weighted_mean(0.2)
    w_x = 1.0 / math.sqrt(1.0 - 0.09)
    w_y = 1.0 / math.sqrt(1.0 - 0.04)
    return [
        _entry("const_one", ONE, ONE, SmoothnessClass(0, 0),
               analytic_variations=VariationBundle(0.0, 0.0, 0.0, "analytic"),
               poly_degree=(0, 0), smooth=True, notes="f = 1; every partial vanishes"),
        _entry("bilinear", LINEAR, LINEAR, SmoothnessClass(0, 0),
               analytic_variations=VariationBundle(pi2, 2 * math.pi, 2 * math.pi, "analytic"),
               poly_degree=(1, 1), smooth=True, notes="f = x y; f_xy = 1"),
        _entry("tensor_cheb", CHEB2, CHEB3, SmoothnessClass(0, 0),
               analytic_variations=VariationBundle(8.0 * cheb3_abs, 16.0, 2.0 * cheb3_abs, "analytic"),
               poly_degree=(2, 3), smooth=True, notes="f = T_2(x) T_3(y)"),
        _entry("abs_xy", ABS, ABS, SmoothnessClass(0, 0),
               analytic_variations=VariationBundle(pi2, 2 * math.pi, 2 * math.pi, "analytic"),
               tail_certificate=(SmoothnessClass(1, 1), VariationBundle(4.0, 4.0, 4.0, "stieltjes")),
               notes="f = |x||y|; kinks on both axes; f_xy = sgn(x) sgn(y); "
                     "f_x has a unit-weight jump of 2 at x = 0, giving V_{1,1} = 4 as a Stieltjes integral"),
        _entry("abs_cubed", ABS_CUBED, ABS_CUBED, SmoothnessClass(2, 2),
               analytic_variations=VariationBundle(36 * pi2, 8 * math.pi, 8 * math.pi, "analytic"),
               notes="f = |x|^3 |y|^3; f_{x^3 y^3} = 36 sgn(x) sgn(y)"),
        _entry("shifted_kink", _abs_shift(0.3), _abs_shift(-0.2), SmoothnessClass(0, 0),
               analytic_variations=VariationBundle(pi2, math.pi * m_y, math.pi * m_x, "analytic"),
               tail_certificate=(SmoothnessClass(1, 1),
                                 VariationBundle(4.0 * w_x * w_y, 2.0 * w_x * m_y, 2.0 * w_y * m_x, "stieltjes")),
               notes="f = |x - 0.3| |y + 0.2|; kinks off the symmetry axes"),
        _entry("smooth_exp", EXP, EXP, SmoothnessClass(3, 3),
               analytic_variations=VariationBundle(v_exp, v_exp, v_exp, "analytic"),
               smooth=True, notes="f = exp(x + y); every partial equals f"),
        _runge(),
        _entry("edge_sqrt", SQRT_EDGE, SQRT_EDGE, SmoothnessClass(0, 0),
               notes="f = sqrt(1-x^2) sqrt(1-y^2); f_xy blows up at the edges and its weighted "
                     "variation diverges logarithmically"),
    ]


def get_entry(name: str) -> CorpusEntry:
    for e in builtin_corpus():
        if e.name == name:
            return e
    names = ", ".join(e.name for e in builtin_corpus())
    raise KeyError(f"unknown corpus entry {name!r}; available: {names}")
