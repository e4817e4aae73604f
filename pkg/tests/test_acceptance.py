"""End-to-end acceptance checks; each test is one numbered criterion.

A summary line per criterion is printed at the end of the pytest run.
"""

import json
import math
import random
import time

import numpy as np
import pytest

from bicheb.aliasing import reconstruct_quadrature_coeff
from bicheb.bounds import (
    DOMAIN_AREA,
    SmoothnessClass,
    VariationBundle,
    coeff_bound,
    l1_bound_exact_partial,
    tail_sum_closed_form,
)
from bicheb.cli import main
from bicheb.compression import compression_report, threshold_by_bound
from bicheb.core import (
    ChebGrid,
    compute_coeffs_quadrature,
    derivative_coeff,
    eval_partial_sum,
    eval_T,
    exact_coeffs_oracle,
)
from bicheb.corpus import builtin_corpus, get_entry
from bicheb.expr import Binary, Num, ParseError, Pow, Unary, Var, FUNCTIONS, parse_expression, to_text
from bicheb.variation import directional_variation, vitali_variation

PI2 = math.pi**2
criterion = pytest.mark.criterion


@criterion(1, "quadrature orthogonality pattern {1, 2, 4} for T_p T_q, p, q <= 8, n = 16")
def test_orthogonality(record_property):
    t0 = time.perf_counter()
    grid = ChebGrid(16, 16)
    worst = 0.0
    for p in range(9):
        for q in range(9):
            C = compute_coeffs_quadrature(lambda x, y: eval_T(p, x) * eval_T(q, y), grid, 15, 15).entries
            want = np.zeros_like(C)
            want[p, q] = (2 if p == 0 else 1) * (2 if q == 0 else 1)
            worst = max(worst, np.abs(C - want).max())
    dt = time.perf_counter() - t0
    record_property("detail", f"max err {worst:.2e}, {dt:.2f} s")
    assert worst <= 1e-12
    assert dt < 1.0


@criterion(2, "f = 1 gives c00 = 4 on n in {4, 8, 16, 32}; partial sum is 1")
def test_constant_normalization(record_property):
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-1, 1, (2, 200))
    worst_c, worst_s = 0.0, 0.0
    for n in (4, 8, 16, 32):
        C = compute_coeffs_quadrature(lambda x, y: np.ones_like(x), ChebGrid(n, n), n - 1, n - 1)
        E = C.entries.copy()
        worst_c = max(worst_c, abs(E[0, 0] - 4.0))
        E[0, 0] = 0.0
        worst_c = max(worst_c, np.abs(E).max())
        worst_s = max(worst_s, np.abs(eval_partial_sum(C, x, y) - 1.0).max())
    record_property("detail", f"coeff err {worst_c:.1e}, sum err {worst_s:.1e}")
    assert worst_c <= 1e-13 and worst_s <= 1e-13


@criterion(3, "aliasing fixed point: T_16 on 8 nodes gives c~00 = -4, reconstructed from c_16,0 = 2")
def test_aliasing_fixed_point(record_property):
    t0 = time.perf_counter()
    f = lambda x, y: eval_T(16, x) + 0.0 * y
    q = compute_coeffs_quadrature(f, ChebGrid(8, 8), 0, 0).entries[0, 0]
    exact = exact_coeffs_oracle(f, 2 * 8 + 0, 2 * 8 + 0)
    assert exact.entries[16, 0] == pytest.approx(2.0, abs=1e-12)
    r = reconstruct_quadrature_coeff(exact, 0, 0, 8, 8, 1)
    dt = time.perf_counter() - t0
    record_property("detail", f"direct {q:.15f}, reconstructed {r:.15f}, {dt:.2f} s")
    assert abs(q + 4.0) <= 1e-12 and abs(r + 4.0) <= 1e-12
    assert dt < 1.0


@criterion(4, "no aliasing below the node count for corpus polynomials")
def test_no_aliasing(record_property):
    worst = 0.0
    polys = [e for e in builtin_corpus() if e.poly_degree is not None]
    for e in polys:
        px, py = e.poly_degree
        for nx, ny in [(px + 1, py + 1), (px + 3, py + 2), (12, 12)]:
            Cq = compute_coeffs_quadrature(e.f, ChebGrid(nx, ny), nx - 1, ny - 1).entries
            Ce = exact_coeffs_oracle(e.f, nx - 1, ny - 1).entries
            worst = max(worst, np.abs(Cq - Ce).max())
    record_property("detail", f"{len(polys)} polynomials, max |c~ - c| = {worst:.1e}")
    assert worst <= 1e-11


@criterion(5, "decay-audit certifies abs_xy (0, 0) and abs_cubed (2, 2) up to i, j = 64")
@pytest.mark.parametrize("name,k", [("abs_xy", 0), ("abs_cubed", 2)])
def test_decay_audit(name, k, capsys, record_property):
    t0 = time.perf_counter()
    code = main(["decay-audit", "--fn", name, "--k", str(k), "--l", str(k), "--imax", "64", "--jmax", "64",
                 "--oversample", "4", "--quiet"])
    doc = json.loads(capsys.readouterr().out)
    dt = time.perf_counter() - t0
    rep = doc["bound_report"]
    record_property("detail", f"{name}: exit {code}, {len(rep['violations'])} violations, "
                              f"max ratio {rep['max_ratio']:.3f}, {dt:.1f} s")
    assert code == 0 and rep["violations"] == []
    assert dt < 30.0


@criterion(6, "oracle c22 of |x||y| equals 16/(9 pi^2) and sits below its bound")
def test_known_coefficient(record_property):
    C = exact_coeffs_oracle(lambda x, y: np.abs(x) * np.abs(y), 8, 8, oversample=400)
    c22 = C.entries[2, 2]
    want = 16.0 / (9.0 * PI2)
    bound = coeff_bound(SmoothnessClass(0, 0), PI2, 2, 2)
    rel = abs(c22 - want) / want
    record_property("detail", f"c22 = {c22:.10f}, rel err {rel:.1e}, bound {bound}")
    assert rel <= 1e-6
    assert abs(c22) < bound == pytest.approx(1.0)


@criterion(7, "variation quadrature at n = 256 within 0.5% of pi^2, 36 pi^2, 8 pi")
def test_variation_quadrature(record_property):
    v00 = vitali_variation(get_entry("abs_xy").partial(1, 1), 256)
    cubed = get_entry("abs_cubed")
    v22 = vitali_variation(cubed.partial(3, 3), 256)
    v2x = directional_variation(cubed.partial(3, 0), 256, "x")
    errs = [abs(v00 / PI2 - 1), abs(v22 / (36 * PI2) - 1), abs(v2x / (8 * math.pi) - 1)]
    record_property("detail", "rel errs " + ", ".join(f"{e:.1e}" for e in errs))
    assert max(errs) <= 5e-3


@criterion(8, "integration-by-parts coefficient recurrences for exp(x+y), 1 <= i, j <= 6")
def test_recurrences(record_property):
    n = 40
    f = lambda x, y: np.exp(x + y)
    c = lambda r, s, i, j: derivative_coeff(f, r, s, i, j, n)
    worst = 0.0
    for i in range(1, 7):
        for j in range(1, 7):
            worst = max(worst, abs(c(0, 0, i, j) - (c(1, 0, i - 1, j) - c(1, 0, i + 1, j)) / (2 * i)))
            worst = max(worst, abs(c(0, 0, i, j) - (c(0, 1, i, j - 1) - c(0, 1, i, j + 1)) / (2 * j)))
            # mixed form: both recurrences applied in turn
            mixed = (
                c(1, 1, i - 1, j - 1) - c(1, 1, i + 1, j - 1) - c(1, 1, i - 1, j + 1) + c(1, 1, i + 1, j + 1)
            ) / (4 * i * j)
            worst = max(worst, abs(c(0, 0, i, j) - mixed))
    record_property("detail", f"max residual {worst:.1e}")
    assert worst <= 1e-8


@criterion(9, "error-report certifies abs_cubed (2, 2) for d = 4..32 with slope <= -1.7")
def test_error_report(tmp_path, capsys, record_property):
    out = tmp_path / "err.csv"
    t0 = time.perf_counter()
    code = main(["error-report", "--fn", "abs_cubed", "--k", "2", "--l", "2", "--dmin", "4", "--dmax", "32",
                 "--step", "1", "--out", str(out), "--quiet"])
    dt = time.perf_counter() - t0
    doc = json.loads(out.with_suffix(".json").read_text())
    rows = np.array([[float(v) for v in line.split(",")] for line in out.read_text().splitlines()[1:]])
    slope = np.polyfit(np.log(rows[:, 0]), np.log(rows[:, 1]), 1)[0]
    record_property("detail", f"exit {code}, {len(rows)} degrees, slope {slope:.2f}, {dt:.1f} s")
    assert code == 0 and doc["ok"]
    assert np.all(rows[:, 1] <= rows[:, 2]) and np.all(rows[:, 3] <= rows[:, 4])
    assert slope <= -1.7
    assert dt < 120.0


@criterion(10, "brute-force tail sums (N = 2000) match the telescoped closed form; area constant 4")
def test_telescoping(record_property):
    N = 2000
    v = 1.0
    worst = 0.0
    assert DOMAIN_AREA == 4.0
    for k in (1, 2):
        for l in (1, 2):
            cls = SmoothnessClass(k, l)
            ref = coeff_bound(cls, v, k + 1, l + 1)
            # the bound is a product of per-axis factors; confirm on a block, then sum each axis
            for i in range(k + 1, k + 40):
                for j in range(l + 1, l + 40, 7):
                    sep = coeff_bound(cls, v, i, l + 1) * coeff_bound(cls, v, k + 1, j) / ref
                    assert coeff_bound(cls, v, i, j) == pytest.approx(sep, rel=1e-14)
            for d_x, d_y in ((k, l), (5, 5), (17, 3)):
                sx = math.fsum(coeff_bound(cls, v, i, l + 1) for i in range(d_x + 1, N + 1))
                sy = math.fsum(coeff_bound(cls, v, k + 1, j) for j in range(d_y + 1, N + 1))
                brute = sx * sy / ref
                closed = tail_sum_closed_form(cls, v, d_x, d_y, n_max=N)
                worst = max(worst, abs(brute - closed) / closed)
            # frozen constant: the L1 bound is the area of the square times the infinite tail
            inf_tail = tail_sum_closed_form(cls, v, 3, 4)
            assert l1_bound_exact_partial(cls, v, 3, 4) == pytest.approx(4.0 * inf_tail, rel=1e-15)
    record_property("detail", f"max rel gap {worst:.1e}")
    assert worst <= 1e-6


@criterion(11, "compression of abs_xy (degree 32) is sound and matches enumeration")
def test_compression(record_property):
    C = exact_coeffs_oracle(lambda x, y: np.abs(x) * np.abs(y), 32, 32)
    bundle = VariationBundle(PI2, 2 * math.pi, 2 * math.pi)
    details = []
    for eps in (1e-2, 1e-3, 1e-4):
        S = threshold_by_bound(C, SmoothnessClass(0, 0), bundle, eps)
        keep = set()
        for i in range(33):
            for j in range(33):
                cands = [b for ok, b in ((i and j, 4 / (i * j or 1)), (i, 8 / (math.pi * (i or 1))),
                                         (j, 8 / (math.pi * (j or 1)))) if ok]
                if not cands or min(cands) >= eps:
                    keep.add((i, j))
        rep = compression_report(S, m=256)
        details.append(f"eps {eps:g}: kept {len(S.kept)}, l1 {rep['measured_l1_vs_dense']:.2e} <= {rep['budget']:.2e}")
        assert S.kept_set == keep
        assert rep["measured_l1_vs_dense"] <= rep["budget"] * (1 + 1e-6) + 1e-15
    record_property("detail", "; ".join(details))


def _random_ast(rng, depth=0):
    if depth > 5 or rng.random() < 0.25:
        return Var(rng.choice("xy")) if rng.random() < 0.4 else Num(rng.choice([0.0, 1.0, 0.5, rng.uniform(0, 50)]))
    kind = rng.randrange(4)
    if kind == 0:
        return Unary(rng.choice(("neg",) + FUNCTIONS), _random_ast(rng, depth + 1))
    if kind == 1:
        return Pow(_random_ast(rng, depth + 1), rng.randint(-3, 6))
    return Binary(rng.choice("+-*/"), _random_ast(rng, depth + 1), _random_ast(rng, depth + 1))


@criterion(12, "parser survives 10^4 fuzzed strings; 10^3 random ASTs round-trip")
def test_parser(record_property):
    rng = random.Random(2024)
    alphabet = "xy0123456789.+-*/^()  abscoinexpi_e$#\n"
    parsed = errors = 0
    for _ in range(10_000):
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 64)))
        try:
            parse_expression(s)
            parsed += 1
        except ParseError as e:
            assert e.line >= 1 and e.column >= 1
            errors += 1
    for _ in range(1000):
        ast = _random_ast(rng)
        assert parse_expression(to_text(ast)) == ast
    record_property("detail", f"{parsed} parsed, {errors} positioned errors, 1000 round trips")
