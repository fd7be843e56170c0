import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from gkern.special import (ArccosSeries, SphereBasis, arccos_coeffs,
                           build_quadrature, gegenbauer_c, gegenbauer_table,
                           harmonic_dim, surface_measure)
from oracles import gegenbauer_ref, harmonic_dim_ref, tau_moment


class TestSurfaceMeasure:
    def test_hand_values(self):
        assert surface_measure(1) == pytest.approx(2 * math.pi, abs=1e-14)
        assert surface_measure(2) == pytest.approx(4 * math.pi, abs=1e-13)
        assert surface_measure(0) == pytest.approx(2.0, abs=1e-14)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            surface_measure(-1)


class TestGegenbauer:
    @pytest.mark.parametrize("d", [1, 2, 3, 5, 10])
    @pytest.mark.parametrize("n", [0, 1, 2, 7, 20])
    def test_normalized_at_one(self, d, n):
        assert gegenbauer_c(d, n, 1.0) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 4, 7])
    def test_degree_one_is_identity(self, d):
        x = np.linspace(-1, 1, 11)
        assert np.allclose(gegenbauer_c(d, 1, x), x, atol=1e-15)

    def test_legendre_value(self):
        assert gegenbauer_c(2, 2, 0.0) == pytest.approx(-0.5, abs=1e-14)

    def test_chebyshev_limit(self):
        x = np.linspace(-1, 1, 41)
        for n in (0, 1, 3, 8):
            assert np.allclose(gegenbauer_c(1, n, x), np.cos(n * np.arccos(x)),
                               atol=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 4, 6])
    @pytest.mark.parametrize("n", [2, 5, 11])
    def test_against_reference_evaluation(self, d, n):
        x = np.linspace(-0.99, 0.99, 37)
        assert np.allclose(gegenbauer_c(d, n, x), gegenbauer_ref(d, n, x),
                           atol=1e-11)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            gegenbauer_c(2, 3, 1.2)

    @given(d=st.integers(1, 8), n=st.integers(0, 30),
           x=st.floats(-1.0, 1.0, allow_nan=False))
    @hyp_settings(max_examples=200, deadline=None)
    def test_bounded_by_one(self, d, n, x):
        assert abs(gegenbauer_c(d, n, x)) <= 1.0 + 1e-12


class TestHarmonicDim:
    def test_hand_values(self):
        assert harmonic_dim(2, 0) == 1
        assert harmonic_dim(2, 1) == 3
        for n in range(1, 30):
            assert harmonic_dim(2, n) == 2 * n + 1
            assert harmonic_dim(1, n) == 2

    @pytest.mark.parametrize("d", [1, 2, 3, 5, 9])
    @pytest.mark.parametrize("n", [1, 2, 6, 17])
    def test_exact_rational_formula(self, d, n):
        assert harmonic_dim(d, n) == harmonic_dim_ref(d, n)

    def test_no_overflow_for_large_degree(self):
        value = harmonic_dim(40, 200)
        assert value > 10 ** 40   # python ints, exact


class TestQuadrature:
    def test_single_node_symmetry(self):
        nodes, weights = build_quadrature(2, 1)
        assert nodes.tolist() == [0.0]
        assert weights.tolist() == [1.0]

    @pytest.mark.parametrize("d,expect", [(2, 1 / 3), (3, 1 / 4), (1, 1 / 2)])
    def test_second_moment(self, d, expect):
        for m in (2, 5, 12):
            nodes, weights = build_quadrature(d, m)
            assert float(weights @ nodes ** 2) == pytest.approx(expect, abs=1e-12)

    @pytest.mark.parametrize("d", [1, 2, 3, 6])
    def test_polynomial_exactness(self, d):
        m = 7
        nodes, weights = build_quadrature(d, m)
        rng = np.random.default_rng(42 + d)
        coeffs = rng.normal(size=2 * m)   # degree 2m-1
        exact = sum(c * float(tau_moment(d, k)) for k, c in enumerate(coeffs))
        quad = float(weights @ np.polynomial.polynomial.polyval(nodes, coeffs))
        assert quad == pytest.approx(exact, abs=1e-10)

    @pytest.mark.parametrize("d", [1, 2, 5])
    def test_basis_invariants(self, d):
        basis = SphereBasis.create(d, 10)
        assert abs(basis.weights.sum() - 1.0) <= 1e-12
        assert np.all(np.diff(basis.nodes) > 0)
        assert np.all(np.abs(basis.nodes) < 1)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_orthonormality(self, d):
        n_max = 9
        basis = SphereBasis.create(d, n_max, quad_order=n_max + 1)
        table = basis.zonal_table * np.sqrt(basis.harmonic_dims)[:, None]
        gram = (table * basis.weights) @ table.T
        assert np.max(np.abs(gram - np.eye(n_max + 1))) < 1e-10


class TestArccosSeries:
    def test_leading_coefficients(self):
        series = arccos_coeffs(9)
        assert series.coefficients[0] == pytest.approx(math.pi / 2, abs=1e-15)
        assert series.coefficients[1] == pytest.approx(-1.0, abs=1e-15)
        assert series.coefficients[3] == pytest.approx(-1 / 6, abs=1e-15)
        assert np.all(series.coefficients[2::2] == 0)
        assert np.all(series.coefficients[1::2] < 0)

    def test_converges_to_arccos(self):
        x = np.linspace(-0.9, 0.9, 181)
        series = arccos_coeffs(200)
        assert np.max(np.abs(series(x) - np.arccos(x))) <= 1e-8

    def test_error_shrinks_with_truncation(self):
        x = np.linspace(-0.9, 0.9, 61)
        errs = [np.max(np.abs(arccos_coeffs(n)(x) - np.arccos(x)))
                for n in (25, 50, 100)]
        assert errs[0] > errs[1] > errs[2]

    def test_type(self):
        assert isinstance(arccos_coeffs(5), ArccosSeries)
        with pytest.raises(ValueError):
            arccos_coeffs(0)


def test_table_matches_single_evaluations():
    x = np.linspace(-1, 1, 9)
    table = gegenbauer_table(3, 6, x)
    for n in range(7):
        assert np.allclose(table[n], gegenbauer_c(3, n, x), atol=0)
