"""Special-function unit tests against independent quadrature/series oracles."""

import math

import numpy as np
import pytest

import oracles
from rfvlc import specfun
from rfvlc.specfun import (
    ConvergenceError,
    DomainError,
    EvalTolerance,
    UnsupportedParametersError,
    binomial,
    gen_exponential_integral,
    log_binomial,
    log_gamma,
    log_multinomial,
    meijer_g_2122,
    modified_bessel_i,
    multinomial,
    upper_incomplete_gamma,
)

# frozen oracle values, computed from the defining integrals / series before
# the implementation (mpmath cross-checks agree to shown digits)
GAMMA_2_5_1_3 = 1.0121136007032034      # quadrature over [1.3, inf)
E1_AT_1 = 0.21938393439552027           # quadrature of the E_nu integral
MEIJER_HALF_2_07 = 1.6392885872847454   # quadrature of the Gamma-kernel integral
BESSEL_I1_1 = 0.565159103992485         # 30-term ascending series


class TestEvalTolerance:
    def test_defaults(self):
        tol = EvalTolerance()
        assert tol.rel_tol == 1e-10
        assert tol.max_terms >= 50

    @pytest.mark.parametrize("kwargs", [
        {"rel_tol": 0.0}, {"rel_tol": 1e-2}, {"rel_tol": -1e-9},
        {"max_terms": 10}, {"quad_limit": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            EvalTolerance(**kwargs)


class TestUpperIncompleteGamma:
    @pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 2.7, 10.0, 40.0])
    def test_s1_is_exp(self, x):
        assert upper_incomplete_gamma(1.0, x) == pytest.approx(math.exp(-x), rel=1e-12)

    def test_at_zero_is_gamma(self):
        assert upper_incomplete_gamma(0.5, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert upper_incomplete_gamma(4.0, 0.0) == pytest.approx(6.0, rel=1e-13)

    def test_frozen_quadrature_value(self):
        assert upper_incomplete_gamma(2.5, 1.3) == pytest.approx(GAMMA_2_5_1_3, rel=1e-10)

    @pytest.mark.parametrize("s,x", [(0.3, 0.05), (0.5, 2.0), (2.5, 1.3),
                                     (7.0, 3.0), (7.0, 20.0), (15.5, 40.0)])
    def test_against_quadrature(self, s, x):
        assert upper_incomplete_gamma(s, x) == pytest.approx(
            oracles.quad_upper_gamma(s, x), rel=1e-10)

    def test_decreasing_in_x(self):
        xs = np.linspace(0.0, 30.0, 40)
        vals = [upper_incomplete_gamma(2.2, x) for x in xs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("s,x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1),
                                     (math.nan, 1.0), (1.0, math.inf)])
    def test_domain_errors(self, s, x):
        with pytest.raises(DomainError):
            upper_incomplete_gamma(s, x)

    def test_recurrence_property(self):
        # Gamma(s+1, x) = s Gamma(s, x) + x^s e^-x over the working domain
        for s in np.geomspace(0.1, 20.0, 12):
            for x in [0.0, 0.05, 0.7, 3.0, 11.0, 27.0, 50.0]:
                lhs = upper_incomplete_gamma(s + 1.0, x)
                rhs = s * upper_incomplete_gamma(s, x) + x ** s * math.exp(-x)
                assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_series_sum_identity(self):
        # sum_{q<n} z^q/q! = e^z Gamma(n, z) / Gamma(n) for integer n
        for n in range(1, 13):
            for z in [0.01, 0.1, 0.9, 3.0, 8.5, 20.0]:
                partial = sum(z ** q / math.factorial(q) for q in range(n))
                rhs = (math.exp(z) * upper_incomplete_gamma(float(n), z)
                       / math.gamma(n))
                assert partial == pytest.approx(rhs, rel=1e-10)

    def test_pure(self):
        a = upper_incomplete_gamma(2.5, 1.3)
        b = upper_incomplete_gamma(2.5, 1.3)
        assert a == b


class TestGenExponentialIntegral:
    @pytest.mark.parametrize("x", [0.05, 0.5, 1.0, 4.0, 20.0])
    def test_order_zero_identity(self, x):
        assert gen_exponential_integral(0.0, x) == pytest.approx(
            math.exp(-x) / x, rel=1e-12)

    def test_e1_frozen(self):
        assert gen_exponential_integral(1.0, 1.0) == pytest.approx(E1_AT_1, rel=1e-10)

    @pytest.mark.parametrize("nu,x", [(1.0, 0.2), (1.0, 3.7), (0.75, 0.01),
                                      (0.75, 2.0), (-0.25, 1.3), (-3.25, 0.4)])
    def test_against_quadrature(self, nu, x):
        assert gen_exponential_integral(nu, x) == pytest.approx(
            oracles.quad_exp_integral(nu, x), rel=1e-9)

    def test_defining_identity_machine_level(self):
        for nu in [-2.25, -0.25, 0.4, 0.75]:
            for x in [0.01, 0.3, 1.0, 7.0]:
                direct = gen_exponential_integral(nu, x)
                via = x ** (nu - 1.0) * upper_incomplete_gamma(1.0 - nu, x)
                assert direct == pytest.approx(via, rel=5e-15)

    def test_half_order_example(self):
        # E_{-1.5}(2) = 2^{-2.5} Gamma(2.5, 2)
        assert gen_exponential_integral(-1.5, 2.0) == pytest.approx(
            2.0 ** (-2.5) * upper_incomplete_gamma(2.5, 2.0), rel=5e-15)

    def test_near_integer_guard(self):
        with pytest.raises(UnsupportedParametersError):
            gen_exponential_integral(1e-10, 1.0)
        with pytest.raises(UnsupportedParametersError):
            gen_exponential_integral(-2.0 + 1e-10, 1.0)

    @pytest.mark.parametrize("nu,x", [(1.5, 1.0), (0.5, 0.0), (0.5, -1.0)])
    def test_domain_errors(self, nu, x):
        with pytest.raises(DomainError):
            gen_exponential_integral(nu, x)


class TestMeijerG:
    def test_rational_reduction(self):
        # G^{2,1}_{2,2}(z | 0, 1; 0, 1) = 1/(1+z)
        for z in [0.1, 0.5, 1.0, 4.0, 25.0]:
            assert meijer_g_2122(0.0, 1.0, 0.0, 1.0, z) == pytest.approx(
                1.0 / (1.0 + z), rel=1e-12)
        assert meijer_g_2122(0.0, 1.0, 0.0, 1.0, 1.0) == pytest.approx(0.5, rel=1e-13)

    def test_integer_family_n3(self):
        assert meijer_g_2122(0.0, 1.0, 0.0, 3.0, 1.0) == pytest.approx(1.75, rel=1e-12)

    def test_frozen_quadrature_value(self):
        assert meijer_g_2122(0.5, 1.0, 0.0, 2.0, 0.7) == pytest.approx(
            MEIJER_HALF_2_07, rel=1e-10)

    @pytest.mark.parametrize("a,n,z", [(0.5, 1, 0.3), (0.5, 4, 1.7), (1.0, 2, 0.05),
                                       (1.0, 5, 3.0), (0.5, 3, 12.0)])
    def test_integer_family_vs_quadrature(self, a, n, z):
        got = meijer_g_2122(1.0 - a, 1.0, 0.0, float(n), z)
        assert got == pytest.approx(oracles.quad_meijer_integer_family(a, n, z), rel=1e-8)

    @pytest.mark.parametrize("alpha,nu,z", [
        (0.5, 0.75, 0.4), (1.5, 0.75, 0.4), (2.5, -0.25, 0.4),
        (1.5, -0.25, 2.4), (3.0, -1.25, 0.08), (0.5, 0.8, 11.0),
    ])
    def test_expint_family_vs_quadrature(self, alpha, nu, z):
        got = meijer_g_2122(1.0 - alpha, nu, nu - 1.0, 0.0, z)
        assert got == pytest.approx(oracles.quad_meijer_expint_family(alpha, nu, z),
                                    rel=1e-7)

    def test_contour_agrees_with_reductions(self):
        cases = [
            (0.0, 1.0, 0.0, 3.0, 1.0),
            (0.5, 1.0, 0.0, 2.0, 0.7),
            (-1.0, 0.75, -0.25, 0.0, 0.4),
            (-0.5, -0.25, -1.25, 0.0, 2.4),
        ]
        for a1, a2, b1, b2, z in cases:
            auto = meijer_g_2122(a1, a2, b1, b2, z)
            contour = meijer_g_2122(a1, a2, b1, b2, z, method="contour")
            assert contour == pytest.approx(auto, rel=1e-9)

    def test_mpmath_crosscheck(self):
        mp = pytest.importorskip("mpmath")
        cases = [
            (0.5, 1.0, 0.0, 2.0, 0.7),
            (-1.0, 0.75, -0.25, 0.0, 0.4),
            (-0.5, -0.25, -1.25, 0.0, 2.4),
            (0.0, 1.0, 0.0, 4.0, 5.0),
        ]
        for a1, a2, b1, b2, z in cases:
            ref = float(mp.meijerg([[a1], [a2]], [[b1, b2], []], z))
            assert meijer_g_2122(a1, a2, b1, b2, z) == pytest.approx(ref, rel=1e-9)

    def test_structural_zero_parameter(self):
        # family produced by the BER floors: one 2F1 numerator parameter is
        # exactly zero after float arithmetic; must not blow up
        nu = 2.646 / 3.646 - 1.0
        got = meijer_g_2122(1.0 - 0.5 - 1.0, nu, nu - 1.0, 0.0, 2.3719)
        assert math.isfinite(got)
        assert got == pytest.approx(
            oracles.quad_meijer_expint_family(1.5, nu, 2.3719), rel=1e-7)

    def test_unsupported_parameters_raise(self):
        # integer gap between lower parameters outside the closed-form family
        # and no separating straight contour
        with pytest.raises(UnsupportedParametersError):
            meijer_g_2122(2.0, 1.0, 0.0, 1.0, 0.5)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            meijer_g_2122(0.0, 1.0, 0.0, 1.0, 0.0)
        with pytest.raises(DomainError):
            meijer_g_2122(0.0, 1.0, 0.0, 1.0, -2.0)


class TestModifiedBesselI:
    def test_trivial_values(self):
        assert modified_bessel_i(0.0, 0.0) == 1.0
        assert modified_bessel_i(2.0, 0.0) == 0.0

    def test_half_order_identity(self):
        expected = math.sqrt(2.0 / (math.pi * 2.0)) * math.sinh(2.0)
        assert modified_bessel_i(0.5, 2.0) == pytest.approx(expected, rel=1e-12)

    def test_frozen_series_value(self):
        assert modified_bessel_i(1.0, 1.0) == pytest.approx(BESSEL_I1_1, rel=1e-12)

    def test_against_scipy(self):
        from scipy.special import iv
        for nu in [0.0, 1.0, 2.0, 3.5]:
            for x in [0.1, 1.0, 8.0, 35.0]:
                assert modified_bessel_i(nu, x) == pytest.approx(float(iv(nu, x)),
                                                                 rel=1e-10)

    def test_overflow_threshold(self):
        with pytest.raises(OverflowError):
            modified_bessel_i(0.0, 701.0)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            modified_bessel_i(-1.0, 1.0)
        with pytest.raises(DomainError):
            modified_bessel_i(1.0, -1.0)


class TestCombinatorics:
    def test_binomial(self):
        assert binomial(5, 2) == 10
        assert binomial(0, 0) == 1
        with pytest.raises(DomainError):
            binomial(3, 5)

    def test_multinomial(self):
        assert multinomial(3, (1, 2)) == 3
        assert multinomial(4, (2, 1, 1)) == 12
        with pytest.raises(DomainError):
            multinomial(3, (1, 1))

    def test_log_gamma(self):
        assert log_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-14)
        with pytest.raises(DomainError):
            log_gamma(0.0)

    def test_log_variants_match_exact(self):
        assert log_binomial(40, 17) == pytest.approx(math.log(binomial(40, 17)),
                                                     rel=1e-12)
        assert log_multinomial(9, (2, 3, 4)) == pytest.approx(
            math.log(multinomial(9, (2, 3, 4))), rel=1e-12)
