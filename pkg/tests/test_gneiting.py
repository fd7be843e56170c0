import math

import numpy as np
import pytest

from gkern.gneiting import (CMMixture, cm_mixture_coeffs, exp_arccos_coeffs,
                            psi_infinity_check, rn_table)
from gkern.report import CERTIFIED_NOT_PD, CERTIFIED_PD, INCONCLUSIVE
from gkern.schoenberg import KernelField, d_schoenberg
from gkern.special import SphereBasis
from oracles import exp_series_polynomials

# published low-order table of the coefficient polynomials (ascending powers)
KNOWN_POLYS = {
    0: (1,),
    1: (0, 1),
    2: (0, 0, 1),
    3: (0, 1, 0, 1),
    4: (0, 0, 4, 0, 1),
    5: (0, 9, 0, 10, 0, 1),
    6: (0, 0, 64, 0, 20, 0, 1),
    7: (0, 225, 0, 259, 0, 35, 0, 1),
}


class TestRnTable:
    def test_known_values(self):
        table = rn_table(7)
        for n, coeffs in KNOWN_POLYS.items():
            assert tuple(table[n]) == coeffs

    def test_rendering(self):
        table = rn_table(7)
        assert table.render(0) == "1"
        assert table.render(1) == "a"
        assert table.render(5) == "a^5+10a^3+9a"
        assert table.render(7) == "a^7+35a^5+259a^3+225a"

    def test_against_series_composition_oracle(self):
        oracle = exp_series_polynomials(15)
        table = rn_table(15)
        for n in range(16):
            assert tuple(table[n]) == oracle[n]

    def test_monic_nonnegative_parity(self):
        table = rn_table(40)
        for n in range(41):
            coeffs = table[n]
            assert coeffs[-1] == 1            # monic
            assert all(c >= 0 for c in coeffs)
            for j, c in enumerate(coeffs):
                if (j - n) % 2 != 0:
                    assert c == 0

    def test_exactness_at_forty(self):
        # degree-40 leading structure stays exact integer arithmetic
        table = rn_table(40)
        assert isinstance(table[40][1], int)
        assert table[40][-1] == 1

    def test_csv(self, tmp_path):
        table = rn_table(3)
        path = tmp_path / "rn.csv"
        table.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "n,power,coefficient"
        assert "3,1,1" in lines and "3,3,1" in lines


class TestExpArccosCoeffs:
    def test_zeroth_term(self):
        for a in (0.5, 2.0):
            assert exp_arccos_coeffs(a, 0)[0] == pytest.approx(
                math.exp(-a * math.pi / 2), abs=1e-16)

    def test_third_term_unit_rate(self):
        # r_3(1) = 2, so the x^3 coefficient is e^(-pi/2)/3
        coeffs = exp_arccos_coeffs(1.0, 3)
        assert coeffs[3] == pytest.approx(math.exp(-math.pi / 2) / 3, rel=1e-15)

    def test_all_terms_positive(self):
        assert np.all(exp_arccos_coeffs(3.0, 300) > 0)

    def test_matches_exact_integer_table(self):
        table = rn_table(60)
        for a in (0.5, 1.0, 3.0):
            coeffs = exp_arccos_coeffs(a, 60)
            for n in (10, 37, 60):
                exact = (math.exp(-a * math.pi / 2) * table.evaluate(n, a)
                         / math.factorial(n))
                assert coeffs[n] == pytest.approx(exact, rel=1e-13)

    @pytest.mark.parametrize("a", [0.5, 1.0])
    def test_taylor_cross_check_moderate_rates(self, a):
        x = np.linspace(-0.9, 0.9, 50)
        approx = np.polynomial.polynomial.polyval(x, exp_arccos_coeffs(a, 120))
        assert np.max(np.abs(approx - np.exp(-a * np.arccos(x)))) <= 1e-8

    def test_taylor_cross_check_fast_rate_needs_deeper_truncation(self):
        # the x = 0.9 truncation gap at 120 terms genuinely sits above 1e-8
        # for rate 3; thirty more terms push it below
        x = np.linspace(-0.9, 0.9, 50)
        target = np.exp(-3.0 * np.arccos(x))
        err_120 = np.max(np.abs(
            np.polynomial.polynomial.polyval(x, exp_arccos_coeffs(3.0, 120)) - target))
        err_150 = np.max(np.abs(
            np.polynomial.polynomial.polyval(x, exp_arccos_coeffs(3.0, 150)) - target))
        assert 1e-8 < err_120 < 3e-8
        assert err_150 <= 1e-8

    def test_partial_sums_at_one_follow_sqrt_tail(self):
        # f(1) = 1; the square-root endpoint singularity leaves a tail
        # shrinking like N^(-1/2), so the gap ratio between N and 4N is ~2
        gaps = [1.0 - exp_arccos_coeffs(1.0, n).sum() for n in (200, 800)]
        assert gaps[0] > gaps[1] > 0
        assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.15)

    def test_invalid_rate(self):
        with pytest.raises(ValueError):
            exp_arccos_coeffs(-1.0, 5)


class TestCMMixture:
    def test_weights_must_normalize(self):
        with pytest.raises(ValueError):
            CMMixture(((1.0, 0.5), (2.0, 0.6)))
        with pytest.raises(ValueError):
            CMMixture(((-1.0, 1.0),))

    def test_single_atom_reduces_to_series(self):
        table = rn_table(12)
        coeffs = cm_mixture_coeffs(CMMixture(((1.5, 1.0),)), 12)
        for n in range(13):
            assert coeffs[n] == pytest.approx(
                math.exp(-1.5 * math.pi / 2) * table.evaluate(n, 1.5), rel=1e-12)

    def test_two_atoms_hand_value(self):
        coeffs = cm_mixture_coeffs(CMMixture(((1.0, 0.5), (2.0, 0.5))), 4)
        expect = 0.5 * math.exp(-math.pi / 2) + 0.5 * 4.0 * math.exp(-math.pi)
        assert coeffs[2] == pytest.approx(expect, rel=1e-14)

    def test_constant_atom(self):
        coeffs = cm_mixture_coeffs(CMMixture(((0.0, 1.0),)), 6)
        assert coeffs[0] == 1.0
        assert np.all(coeffs[1:] == 0.0)

    def test_series_value_at_one_is_bounded(self):
        # partial sums approach rho(0) = 1 from below, at the slow pace the
        # square-root endpoint singularity dictates
        mix = CMMixture(((0.5, 0.25), (1.0, 0.5), (3.0, 0.25)))
        totals = [sum(c / math.factorial(n)
                      for n, c in enumerate(cm_mixture_coeffs(mix, size)))
                  for size in (40, 80, 160)]
        assert totals[0] < totals[1] < totals[2] <= 1.0 + 1e-12
        assert totals[2] == pytest.approx(1.0, abs=0.1)


class TestPsiInfinityCheck:
    def test_exp_arccos_membership(self):
        report = psi_infinity_check(exp_arccos_coeffs(2.0, 100))
        assert report.verdict == CERTIFIED_PD

    def test_bare_coordinate(self):
        assert psi_infinity_check([0.0, 1.0, 0.0, 0.0]).verdict == CERTIFIED_PD

    def test_negative_coefficient_fails_with_witness(self):
        report = psi_infinity_check([1.0, -0.1])
        assert report.verdict == CERTIFIED_NOT_PD
        assert report.witness == 1

    def test_unconverged_tail_is_inconclusive(self):
        coeffs = 1.0 / (1.0 + np.arange(5.0)) ** 2
        assert psi_infinity_check(coeffs).verdict == INCONCLUSIVE


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_mixture_kernels_expand_nonnegatively_on_spheres(d, a):
    basis = SphereBasis.create(d, 20)
    fn = lambda x: np.exp(-a * np.arccos(np.clip(x, -1, 1)))
    series = d_schoenberg(KernelField(basis, fn=fn))
    assert np.min(series.coeffs.real) >= -1e-9
