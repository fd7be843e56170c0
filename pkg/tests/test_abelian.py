import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from gkern.abelian import (AbelianGrid, SampledFunction, bochner_test, fourier,
                           inverse_fourier, linnik_check, linnik_density)
from gkern.gram import PointConfig, gram_matrix, min_eigenvalue
from gkern.report import CERTIFIED_NOT_PD, CERTIFIED_PD, INCONCLUSIVE
from oracles import circulant_min_eig, gaussian_ft, triangle_ft


@pytest.fixture
def line_grid():
    return AbelianGrid.real_line(0.05, 20.0)


class TestGrids:
    def test_cyclic_layout(self):
        g = AbelianGrid.cyclic(6)
        assert g.points.tolist() == list(range(6))
        assert g.dual_points.tolist() == list(range(6))
        assert g.haar_weight == 1.0 and g.dual_weight == pytest.approx(1 / 6)

    def test_real_line_layout(self, line_grid):
        g = line_grid
        assert g.size == 2 * math.ceil(20.0 / 0.05)
        assert np.allclose(g.points + g.points[::-1], 0.0)   # symmetric about 0
        assert np.allclose(sorted(g.dual_points), np.sort(
            2 * np.pi * np.fft.fftfreq(g.size, 0.05)))

    def test_circle_layout(self):
        g = AbelianGrid.circle(8)
        assert g.points[0] == 0.0
        assert g.haar_weight == pytest.approx(2 * np.pi / 8)
        assert sorted(g.dual_points.tolist()) == [-4, -3, -2, -1, 0, 1, 2, 3]

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            AbelianGrid.cyclic(0)
        with pytest.raises(ValueError):
            AbelianGrid.real_line(-0.1, 1.0)


class TestFourier:
    def test_delta_to_constant(self):
        g = AbelianGrid.cyclic(4)
        F = fourier(SampledFunction(g, [1, 0, 0, 0]))
        assert np.allclose(F.values, 1.0)

    def test_constant_to_scaled_delta(self):
        g = AbelianGrid.cyclic(5)
        F = fourier(SampledFunction(g, np.ones(5)))
        assert F.values[0] == pytest.approx(5.0)
        assert np.allclose(F.values[1:], 0.0, atol=1e-12)

    def test_gaussian_closed_form(self, line_grid):
        f = SampledFunction(line_grid, np.exp(-line_grid.points ** 2 / 2))
        F = fourier(f)
        mask = np.abs(line_grid.dual_points) <= 5.0
        assert np.max(np.abs(F.values - gaussian_ft(line_grid.dual_points))[mask]) <= 1e-6

    def test_circle_character_line(self):
        g = AbelianGrid.circle(16)
        f = SampledFunction(g, np.exp(3j * g.points))
        F = fourier(f)
        k3 = np.flatnonzero(g.dual_points == 3)[0]
        assert F.values[k3] == pytest.approx(2 * np.pi)
        others = np.abs(F.values).sum() - abs(F.values[k3])
        assert others <= 1e-10


class TestInverse:
    def test_cyclic_round_trip(self):
        g = AbelianGrid.cyclic(8)
        rng = np.random.default_rng(0)
        f = SampledFunction(g, rng.normal(size=8) + 1j * rng.normal(size=8))
        back = inverse_fourier(fourier(f))
        assert np.max(np.abs(back.values - f.values)) <= 1e-12

    def test_two_point_inversion(self):
        g = AbelianGrid.cyclic(2)
        f = inverse_fourier(SampledFunction(g, [2, 0], dual=True))
        assert np.allclose(f.values, [1, 1])

    def test_real_line_gaussian_round_trip(self, line_grid):
        f = SampledFunction(line_grid, np.exp(-line_grid.points ** 2 / 2))
        back = inverse_fourier(fourier(f))
        assert np.max(np.abs(back.values - f.values)) <= 1e-6
        assert "truncation_bound" in back.meta

    def test_direction_flags(self):
        g = AbelianGrid.cyclic(4)
        f = SampledFunction(g, np.ones(4))
        with pytest.raises(ValueError):
            inverse_fourier(f)
        with pytest.raises(ValueError):
            fourier(fourier(f))


class TestParsevalAndSymmetry:
    def test_cyclic_parseval_exact(self):
        g = AbelianGrid.cyclic(16)
        rng = np.random.default_rng(7)
        f = SampledFunction(g, rng.normal(size=16) + 1j * rng.normal(size=16))
        lhs = np.sum(np.abs(f.values) ** 2)
        rhs = np.sum(np.abs(fourier(f).values) ** 2) / 16
        assert lhs == pytest.approx(rhs, abs=1e-12 * lhs)

    def test_real_line_parseval_within_window_error(self, line_grid):
        f = SampledFunction(line_grid, np.exp(-line_grid.points ** 2 / 2))
        lhs = np.sum(np.abs(f.values) ** 2) * line_grid.haar_weight
        F = fourier(f)
        rhs = np.sum(np.abs(F.values) ** 2) * line_grid.dual_weight
        assert lhs == pytest.approx(rhs, rel=1e-10)

    @given(st.integers(0, 2 ** 32 - 1))
    @hyp_settings(max_examples=30, deadline=None)
    def test_hermitian_gives_real_transform(self, seed):
        g = AbelianGrid.cyclic(12)
        rng = np.random.default_rng(seed)
        half = rng.normal(size=12) + 1j * rng.normal(size=12)
        values = half + np.conj(half[(-np.arange(12)) % 12])
        F = fourier(SampledFunction(g, values))
        assert np.max(np.abs(F.values.imag)) <= 1e-12 * max(1.0, np.max(np.abs(values)))


class TestBochner:
    def test_character_cosine(self):
        g = AbelianGrid.cyclic(8)
        f = SampledFunction(g, np.cos(2 * np.pi * np.arange(8) / 8))
        assert bochner_test(f).verdict == CERTIFIED_PD

    def test_gaussian(self, line_grid):
        f = SampledFunction(line_grid, np.exp(-line_grid.points ** 2 / 2))
        assert bochner_test(f).verdict == CERTIFIED_PD

    def test_triangle_mix_matches_transform_oracle(self, line_grid):
        u = line_grid.points
        tri = lambda w: np.clip(1 - np.abs(u) / w, 0, None)
        f = SampledFunction(line_grid, tri(1.0) - 0.5 * tri(3.0))
        report = bochner_test(f)
        oracle = triangle_ft(line_grid.dual_points, 1.0) - 0.5 * triangle_ft(
            line_grid.dual_points, 3.0)
        assert report.verdict == CERTIFIED_NOT_PD
        assert oracle.min() < 0
        assert report.min_value == pytest.approx(oracle.min(), abs=1e-6)

    def test_all_zero_is_certified(self):
        g = AbelianGrid.cyclic(4)
        assert bochner_test(SampledFunction(g, np.zeros(4))).verdict == CERTIFIED_PD

    def test_boundary_guard(self):
        g = AbelianGrid.real_line(0.5, 3.0)
        f = SampledFunction(g, np.cos(g.points))   # no decay at the edge
        report = bochner_test(f)
        assert report.verdict == INCONCLUSIVE
        assert "window edge" in report.detail

    @given(st.integers(0, 2 ** 32 - 1))
    @hyp_settings(max_examples=25, deadline=None)
    def test_nonnegative_spectrum_always_certifies(self, seed):
        g = AbelianGrid.cyclic(16)
        rng = np.random.default_rng(seed)
        spectrum = SampledFunction(g, rng.random(16), dual=True)
        f = inverse_fourier(spectrum)
        assert bochner_test(f).verdict == CERTIFIED_PD

    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_gram_oracle_agreement(self, n):
        g = AbelianGrid.cyclic(n)
        rng = np.random.default_rng(123)
        for _ in range(100):
            spectrum = rng.normal(size=n) ** 2 - 0.4 * rng.random()
            values = np.fft.ifft(spectrum)
            verdict = bochner_test(SampledFunction(g, values)).verdict
            lam = circulant_min_eig(values)
            if verdict == CERTIFIED_PD:
                assert lam >= -1e-8
            else:
                assert lam < 0
            # full-group Gram matrix agrees with the circulant spectrum
            kern = lambda du: values[np.asarray(du, dtype=int) % n]
            cfg = PointConfig(group_points=np.arange(n))
            assert min_eigenvalue(gram_matrix(kern, cfg, g)) == pytest.approx(
                lam, abs=1e-9 * max(1.0, abs(lam)))


class TestCsv:
    def test_round_trip(self, tmp_path, line_grid):
        f = SampledFunction(line_grid, np.exp(-line_grid.points ** 2 / 3)
                            + 1j * np.sin(line_grid.points))
        path = tmp_path / "f.csv"
        f.to_csv(path)
        back = SampledFunction.from_csv(line_grid, path)
        assert np.array_equal(back.values, f.values)   # bit-identical

    def test_header_is_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            SampledFunction.from_csv(AbelianGrid.cyclic(1), path)


class TestLinnik:
    def test_alpha_one_at_zero(self):
        assert linnik_check(1.0, [0.0]) <= 1e-4

    def test_alpha_half_small_frequencies(self):
        assert linnik_check(0.5, [-2.0, -1.0, 1.0, 2.0]) <= 1e-3

    def test_alpha_one_window(self):
        assert linnik_check(1.0, [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]) <= 1e-3

    def test_closed_form_alpha_one(self):
        from scipy.special import sici
        x = np.array([0.25, 0.5, 1.0, 2.0, 7.0])
        si, ci = sici(x)
        closed = (-np.cos(x) * ci + np.sin(x) * (math.pi / 2 - si)) / math.pi
        assert np.max(np.abs(linnik_density(1.0, x) - closed)) <= 1e-10

    def test_inverse_transform_oracle(self):
        # p_1 should match the numeric inverse transform of 1/(1+|t|)
        from scipy.integrate import quad
        for x in (0.5, 1.5):
            val, _ = quad(lambda t: 1.0 / (1.0 + t), 0, np.inf,
                          weight="cos", wvar=x)
            assert linnik_density(1.0, x) == pytest.approx(val / math.pi, abs=1e-8)

    def test_zero_is_rejected(self):
        with pytest.raises(ValueError):
            linnik_density(0.5, [0.0, 1.0])

    def test_alpha_domain(self):
        with pytest.raises(ValueError):
            linnik_check(1.5, [0.0])
        with pytest.raises(ValueError):
            linnik_check(0.0, [0.0])

    def test_density_is_decreasing_on_positive_axis(self):
        x = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
        p = linnik_density(0.5, x)
        assert np.all(np.diff(p) < 0)
