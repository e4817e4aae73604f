import math

import numpy as np
import pytest
from scipy import integrate

from bicheb.core import (
    ChebGrid,
    CoeffMatrix,
    EvaluationError,
    chebyshev_nodes,
    compute_coeffs_quadrature,
    derivative_coeff,
    eval_partial_sum,
    eval_partial_sum_naive,
    eval_T,
    exact_coeffs_oracle,
    l1_error,
)
from bicheb.corpus import builtin_corpus


def T(p):
    return lambda t: np.cos(p * np.arccos(np.clip(t, -1, 1)))


def abs_T_integral(p):
    """int_{-1}^{1} |T_p(x)| dx by adaptive quadrature split at the roots."""
    roots = sorted(np.cos((2 * np.arange(1, p + 1) - 1) * np.pi / (2 * p)))
    val, _ = integrate.quad(lambda t: abs(math.cos(p * math.acos(t))), -1, 1, points=roots, limit=200,
                            epsabs=1e-14, epsrel=1e-13)
    return val


class TestNodes:
    def test_small_cases(self):
        assert chebyshev_nodes(1) == pytest.approx([0.0], abs=1e-16)
        np.testing.assert_allclose(chebyshev_nodes(2), [math.sqrt(0.5), -math.sqrt(0.5)], rtol=1e-15)
        assert chebyshev_nodes(3)[1] == pytest.approx(0.0, abs=1e-16)

    @pytest.mark.parametrize("n", [1, 2, 5, 16, 33])
    def test_decreasing_symmetric_interior(self, n):
        x = chebyshev_nodes(n)
        assert len(x) == n
        assert np.all(np.diff(x) < 0)
        np.testing.assert_allclose(x, -x[::-1], atol=1e-15)
        assert np.all(np.abs(x) < 1)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            chebyshev_nodes(0)

    def test_grid(self):
        g = ChebGrid(4, 7)
        assert g.nodes_x.shape == (4,) and g.nodes_y.shape == (7,)


class TestEvalT:
    def test_values(self):
        assert eval_T(0, 0.37) == 1.0
        assert eval_T(1, 0.37) == pytest.approx(0.37, abs=1e-15)
        assert eval_T(2, 0.5) == pytest.approx(-0.5, abs=1e-15)

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            eval_T(2, 1.5)

    def test_bounded(self):
        x = np.linspace(-1, 1, 101)
        assert np.all(np.abs(eval_T(17, x)) <= 1 + 1e-15)


class TestQuadratureCoefficients:
    def test_constant(self):
        C = compute_coeffs_quadrature(lambda x, y: 1.0, ChebGrid(6, 9), 5, 8)
        assert C.entries[0, 0] == pytest.approx(4.0, abs=1e-12)
        rest = C.entries.copy()
        rest[0, 0] = 0
        assert np.max(np.abs(rest)) < 1e-12
        assert C.provenance == {"kind": "quadrature", "n_x": 6, "n_y": 9}

    def test_tensor_polynomial(self):
        C = compute_coeffs_quadrature(lambda x, y: T(2)(x) * T(3)(y), ChebGrid(8, 8), 4, 4)
        E = np.zeros((5, 5))
        E[2, 3] = 1.0
        np.testing.assert_allclose(C.entries, E, atol=1e-12)

    def test_fold_to_minus_four(self):
        # T_16 equals -1 at every root of T_8
        C = compute_coeffs_quadrature(lambda x, y: T(16)(x) + 0 * y, ChebGrid(8, 4), 3, 3)
        assert C.entries[0, 0] == pytest.approx(-4.0, abs=1e-12)

    @pytest.mark.parametrize("p,q", [(0, 0), (0, 3), (5, 0), (4, 6)])
    def test_kronecker_pattern(self, p, q):
        C = compute_coeffs_quadrature(lambda x, y: T(p)(x) * T(q)(y), ChebGrid(10, 10), 7, 7)
        E = np.zeros((8, 8))
        E[p, q] = 2.0 ** ((p == 0) + (q == 0))
        np.testing.assert_allclose(C.entries, E, atol=1e-12)

    def test_rejects_unresolvable_degree(self):
        with pytest.raises(ValueError):
            compute_coeffs_quadrature(lambda x, y: x, ChebGrid(4, 4), 4, 2)

    def test_nonfinite_names_node(self):
        with pytest.raises(EvaluationError) as err:
            compute_coeffs_quadrature(lambda x, y: 1.0 / (x - chebyshev_nodes(5)[2]), ChebGrid(5, 3), 2, 2)
        assert err.value.point[0] == pytest.approx(chebyshev_nodes(5)[2])

    def test_evaluations_counted(self):
        seen = []

        def f(x, y):
            seen.append(np.size(x))
            return np.exp(x) * y

        compute_coeffs_quadrature(f, ChebGrid(12, 7), 11, 6)
        assert sum(seen) == 12 * 7

    def test_scalar_only_function(self):
        C = compute_coeffs_quadrature(lambda x, y: math.exp(x + y), ChebGrid(12, 12), 5, 5)
        D = compute_coeffs_quadrature(lambda x, y: np.exp(x + y), ChebGrid(12, 12), 5, 5)
        np.testing.assert_allclose(C.entries, D.entries, atol=1e-15)

    def test_symmetric_function_gives_symmetric_matrix(self):
        C = compute_coeffs_quadrature(lambda x, y: np.abs(x) * np.abs(y) + np.cos(x * y), ChebGrid(20, 20), 19, 19)
        np.testing.assert_allclose(C.entries, C.entries.T, atol=1e-12)

    def test_degenerate_degrees(self):
        C = compute_coeffs_quadrature(lambda x, y: np.exp(x), ChebGrid(16, 4), 10, 0)
        assert C.entries.shape == (11, 1)
        assert eval_partial_sum(C, 0.3, -0.8) == pytest.approx(math.exp(0.3), abs=1e-9)


class TestOracle:
    def test_tensor_polynomial(self):
        C = exact_coeffs_oracle(lambda x, y: T(2)(x) * T(3)(y), 4, 4, 4)
        assert C.entries[2, 3] == pytest.approx(1.0, abs=1e-12)
        assert C.provenance["kind"] == "oracle"
        assert C.provenance["n"] == 4 * 5 + 64

    def test_abs_xy_known_coefficients(self):
        C = exact_coeffs_oracle(lambda x, y: np.abs(x) * np.abs(y), 8, 8, 4)
        # classical |x| = 2/pi - (4/pi) sum (-1)^m T_2m / (4m^2 - 1), so raw a_2 = 4/(3 pi)
        assert C.entries[2, 2] == pytest.approx(16 / (9 * math.pi**2), rel=1e-3)
        assert abs(C.entries[1, 1]) < 1e-12

    def test_rejects_small_oversample(self):
        with pytest.raises(ValueError):
            exact_coeffs_oracle(lambda x, y: x, 3, 3, 1)

    @pytest.mark.parametrize("entry", [e for e in builtin_corpus() if e.smooth], ids=lambda e: e.name)
    def test_stable_under_oversampling(self, entry):
        a = exact_coeffs_oracle(entry.f, 8, 8, 4).entries
        b = exact_coeffs_oracle(entry.f, 8, 8, 8).entries
        np.testing.assert_allclose(a, b, atol=1e-10, rtol=0)


class TestPartialSum:
    def test_constant(self):
        C = compute_coeffs_quadrature(lambda x, y: 1.0, ChebGrid(4, 4), 3, 3)
        pts = np.linspace(-1, 1, 7)
        np.testing.assert_allclose(eval_partial_sum(C, pts, pts[::-1]), 1.0, atol=1e-12)

    def test_single_entry(self):
        E = np.zeros((4, 5))
        E[2, 3] = 1.0
        assert eval_partial_sum(CoeffMatrix(E), 0.5, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_bilinear_reproduced(self):
        C = compute_coeffs_quadrature(lambda x, y: x * y, ChebGrid(6, 6), 3, 3)
        assert eval_partial_sum(C, 0.3, -0.7) == pytest.approx(-0.21, abs=1e-12)

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            eval_partial_sum(CoeffMatrix(np.ones((2, 2))), 1.2, 0.0)

    @pytest.mark.parametrize("d", [0, 1, 5, 33, 64])
    def test_clenshaw_matches_naive(self, d):
        rng = np.random.default_rng(d)
        C = CoeffMatrix(rng.normal(size=(d + 1, max(d - 3, 0) + 1)))
        x, y = rng.uniform(-1, 1, (2, 100))
        np.testing.assert_allclose(eval_partial_sum(C, x, y), eval_partial_sum_naive(C, x, y), atol=1e-11)

    def test_grid_shaped_input(self):
        C = exact_coeffs_oracle(lambda x, y: np.exp(x - y), 12, 12)
        X, Y = np.meshgrid(np.linspace(-1, 1, 5), np.linspace(-1, 1, 4), indexing="ij")
        np.testing.assert_allclose(eval_partial_sum(C, X, Y), np.exp(X - Y), atol=1e-12)


class TestL1Error:
    def test_exact_cases(self):
        C = compute_coeffs_quadrature(lambda x, y: 1.0, ChebGrid(4, 4), 0, 0)
        assert l1_error(lambda x, y: 1.0, C, 32) < 1e-12
        C = compute_coeffs_quadrature(lambda x, y: x * y, ChebGrid(4, 4), 1, 1)
        assert l1_error(lambda x, y: x * y, C, 32) < 1e-12

    def test_truncated_tensor_product(self):
        f = lambda x, y: T(5)(x) * T(5)(y)
        C = compute_coeffs_quadrature(f, ChebGrid(8, 8), 4, 4)
        expected = abs_T_integral(5) ** 2
        assert l1_error(f, C, 1000) == pytest.approx(expected, rel=1e-4)

    def test_rejects_small_m(self):
        with pytest.raises(ValueError):
            l1_error(lambda x, y: x, CoeffMatrix(np.zeros((1, 1))), 8)


class TestDerivativeCoefficients:
    def test_constant_partial(self):
        assert derivative_coeff(lambda x, y: 1.0, 3, 1, 0, 0, 8) == pytest.approx(4.0, abs=1e-13)

    def test_mixed_partial_of_x2y2(self):
        assert derivative_coeff(lambda x, y: 4 * x * y, 1, 1, 1, 1, 8) == pytest.approx(4.0, abs=1e-13)

    def test_rejects_index_above_grid(self):
        with pytest.raises(ValueError):
            derivative_coeff(lambda x, y: x, 0, 0, 8, 0, 8)

    @pytest.mark.parametrize(
        "partials",
        [
            # f = exp(x + y): every partial is f
            lambda r, s: (lambda x, y: np.exp(x + y)),
            # f = exp(x) cos(2y)
            lambda r, s: (lambda x, y: np.exp(x) * 2.0**s * np.cos(2 * y + s * np.pi / 2)),
            # f = sin(3x) exp(-y)
            lambda r, s: (lambda x, y: 3.0**r * np.sin(3 * x + r * np.pi / 2) * (-1.0) ** s * np.exp(-y)),
        ],
        ids=["exp(x+y)", "exp(x)cos(2y)", "sin(3x)exp(-y)"],
    )
    def test_integration_by_parts_recurrences(self, partials):
        n = 40
        c = lambda r, s, i, j: derivative_coeff(partials(r, s), r, s, i, j, n)
        for r, s in [(0, 0), (1, 0), (0, 2)]:
            for i in range(1, 7):
                for j in range(0, 7):
                    rhs = (c(r + 1, s, i - 1, j) - c(r + 1, s, i + 1, j)) / (2 * i)
                    assert c(r, s, i, j) == pytest.approx(rhs, abs=1e-8)
            for i in range(0, 7):
                for j in range(1, 7):
                    rhs = (c(r, s + 1, i, j - 1) - c(r, s + 1, i, j + 1)) / (2 * j)
                    assert c(r, s, i, j) == pytest.approx(rhs, abs=1e-8)


class TestSerialization:
    def test_csv_roundtrip(self):
        C = exact_coeffs_oracle(lambda x, y: np.exp(x) * np.sin(y), 5, 3)
        text = C.to_csv()
        assert text.splitlines()[0] == "i,j,c"
        assert len(text.splitlines()) == 1 + 6 * 4
        np.testing.assert_array_equal(CoeffMatrix.from_csv(text).entries, C.entries)

    def test_json_roundtrip(self):
        C = exact_coeffs_oracle(lambda x, y: np.cos(x * y), 4, 6)
        back = CoeffMatrix.from_json(C.to_json())
        np.testing.assert_array_equal(back.entries, C.entries)
        assert back.provenance == C.provenance
        assert (back.d_x, back.d_y) == (4, 6)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            CoeffMatrix(np.array([[1.0, np.nan]]))
