"""Selected-RF-link statistics: expansion bookkeeping, distributions, constants."""

import math

import numpy as np
import pytest
from scipy import special as sp

import oracles
from rfvlc import mcsim, rf_link
from rfvlc.perf import BPSK, DBPSK
from rfvlc.rf_link import (
    CapacityError,
    RfConfig,
    ber_rf,
    cdf_gamma_rf,
    const_C,
    const_D,
    enumerate_terms,
    pdf_gamma_rf,
)
from rfvlc.specfun import DomainError

RAYLEIGH_BPSK_MU10 = 0.5 * (1.0 - math.sqrt(10.0 / 11.0))  # 0.023268705377...

GRID_KM = [1, 2, 3]
GRID_RHO = [0.0, 0.5, 0.9, 1.0]


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        {"n_bs": 0}, {"n_bs": -1}, {"m": 0}, {"mu_rf": 0.0}, {"mu_rf": -3.0},
        {"rho": -0.1}, {"rho": 1.1},
    ])
    def test_invalid(self, kwargs):
        base = dict(n_bs=2, m=2, mu_rf=10.0, rho=0.5)
        base.update(kwargs)
        with pytest.raises(DomainError):
            RfConfig(**base)

    def test_alias(self):
        cfg = RfConfig(n_bs=2, m=2, mu_rf=7.5, rho=0.5)
        assert cfg.ps_over_sigma2 == 7.5


class TestEnumerateTerms:
    @pytest.mark.parametrize("m", [1, 2, 4])
    def test_single_station(self, m):
        exp = enumerate_terms(RfConfig(n_bs=1, m=m, mu_rf=10.0, rho=0.3))
        assert len(exp.terms) == 1
        t = exp.terms[0]
        assert (t.p, t.parts, t.order, t.i) == (0, (0,) * m, 0, 0)
        assert t.coeff == pytest.approx(1.0 / math.gamma(m), rel=1e-12)
        assert t.rate == pytest.approx(m / 10.0, rel=1e-14)

    def test_two_stations_m2(self):
        exp = enumerate_terms(RfConfig(n_bs=2, m=2, mu_rf=10.0, rho=0.5))
        keys = [(t.p, t.parts, t.order, t.i) for t in exp.terms]
        assert keys == [
            (0, (0, 0), 0, 0),
            (1, (0, 1), 1, 0),
            (1, (0, 1), 1, 1),
            (1, (1, 0), 0, 0),
        ]

    def test_three_stations_m1(self):
        exp = enumerate_terms(RfConfig(n_bs=3, m=1, mu_rf=10.0, rho=0.5))
        assert len(exp.terms) == 3
        assert all(t.order == 0 and t.parts == (t.p,) for t in exp.terms)

    def test_capacity_cap(self):
        with pytest.raises(CapacityError):
            enumerate_terms(RfConfig(n_bs=12, m=8, mu_rf=10.0, rho=0.5))

    def test_compositions_enumerated_exactly_once(self):
        exp = enumerate_terms(RfConfig(n_bs=4, m=3, mu_rf=10.0, rho=0.5))
        for p in range(4):
            tuples = {t.parts for t in exp.terms if t.p == p}
            assert all(sum(parts) == p for parts in tuples)
            assert len(tuples) == math.comb(p + 2, 2)
            for t in exp.terms:
                if t.p == p:
                    assert t.order == sum(j * l for j, l in enumerate(t.parts))
                    assert t.rate > 0.0

    @pytest.mark.parametrize("n_bs", GRID_KM)
    @pytest.mark.parametrize("m", GRID_KM)
    @pytest.mark.parametrize("rho", GRID_RHO)
    def test_normalization_identity(self, n_bs, m, rho):
        exp = enumerate_terms(RfConfig(n_bs=n_bs, m=m, mu_rf=6.0, rho=rho))
        assert float(np.sum(exp.weights)) == pytest.approx(1.0, abs=1e-10)


class TestCdf:
    def test_rayleigh_point(self):
        cfg = RfConfig(n_bs=1, m=1, mu_rf=10.0, rho=0.0)
        assert cdf_gamma_rf(cfg, 10.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)

    def test_full_correlation_two_branches(self):
        cfg = RfConfig(n_bs=2, m=1, mu_rf=1.0, rho=1.0)
        assert cdf_gamma_rf(cfg, 1.0) == pytest.approx((1.0 - math.exp(-1.0)) ** 2,
                                                       rel=1e-11)

    @pytest.mark.parametrize("n_bs", [2, 3])
    @pytest.mark.parametrize("m", GRID_KM)
    def test_uncorrelated_estimate_matches_single_station(self, n_bs, m):
        multi = RfConfig(n_bs=n_bs, m=m, mu_rf=8.0, rho=0.0)
        single = RfConfig(n_bs=1, m=m, mu_rf=8.0, rho=0.0)
        for g in [0.1, 1.0, 5.0, 20.0]:
            assert cdf_gamma_rf(multi, g) == pytest.approx(
                cdf_gamma_rf(single, g), abs=1e-12)

    @pytest.mark.parametrize("n_bs", GRID_KM)
    @pytest.mark.parametrize("m", GRID_KM)
    def test_full_correlation_reduces_to_selection_combining(self, n_bs, m):
        cfg = RfConfig(n_bs=n_bs, m=m, mu_rf=5.0, rho=1.0)
        for g in [0.2, 1.0, 4.0, 15.0]:
            expected = (1.0 - sp.gammaincc(m, m * g / 5.0)) ** n_bs
            assert cdf_gamma_rf(cfg, g) == pytest.approx(expected, abs=1e-9)

    def test_monotone_and_bounded(self):
        cfg = RfConfig(n_bs=3, m=2, mu_rf=10.0, rho=0.7)
        gs = np.linspace(0.0, 80.0, 60)
        vals = [cdf_gamma_rf(cfg, g) for g in gs]
        assert vals[0] == 0.0
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))

    def test_stochastic_ordering_in_station_count(self):
        # more candidate stations can only improve the selected SNR when rho > 0
        for rho in [0.5, 0.9, 1.0]:
            for g in [0.5, 2.0, 10.0]:
                cdfs = [cdf_gamma_rf(RfConfig(n_bs=k, m=2, mu_rf=10.0, rho=rho), g)
                        for k in (1, 2, 3)]
                assert cdfs[0] >= cdfs[1] - 1e-12 >= cdfs[2] - 2e-12

    def test_rho_invariance_single_station(self):
        ref = None
        for rho in GRID_RHO:
            cfg = RfConfig(n_bs=1, m=2, mu_rf=10.0, rho=rho)
            vals = (cdf_gamma_rf(cfg, 3.0), pdf_gamma_rf(cfg, 3.0),
                    const_C(cfg), const_D(cfg), ber_rf(cfg, BPSK))
            if ref is None:
                ref = vals
            assert vals == pytest.approx(ref, rel=1e-12)


class TestPdf:
    def test_single_station_gamma_density(self):
        cfg = RfConfig(n_bs=1, m=2, mu_rf=1.0, rho=0.0)
        assert pdf_gamma_rf(cfg, 1.0) == pytest.approx(4.0 * math.exp(-2.0), rel=1e-12)

    @pytest.mark.parametrize("n_bs", GRID_KM)
    @pytest.mark.parametrize("m", GRID_KM)
    @pytest.mark.parametrize("rho", GRID_RHO)
    def test_normalization(self, n_bs, m, rho):
        from scipy import integrate
        cfg = RfConfig(n_bs=n_bs, m=m, mu_rf=5.0, rho=rho)
        val, _ = integrate.quad(lambda g: pdf_gamma_rf(cfg, g), 0.0, np.inf,
                                epsabs=1e-12, epsrel=1e-10, limit=300)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_matches_cdf_derivative(self):
        cfg = RfConfig(n_bs=3, m=2, mu_rf=8.0, rho=0.8)
        h = 1e-5
        for g in [0.5, 2.0, 6.0, 15.0]:
            numeric = (cdf_gamma_rf(cfg, g + h) - cdf_gamma_rf(cfg, g - h)) / (2.0 * h)
            assert abs(pdf_gamma_rf(cfg, g) - numeric) < 1e-6

    def test_histogram_equivalence(self):
        # 1e7 selected-SNR samples, 50 bins, sup-norm below 3 standard errors
        cfg = RfConfig(n_bs=2, m=2, mu_rf=5.0, rho=0.7)
        n = 10_000_000
        rng = np.random.Generator(np.random.Philox(20240817))
        edges = np.linspace(0.0, 25.0, 51)
        counts = np.zeros(50, dtype=np.int64)
        done = 0
        while done < n:
            nb = min(2_000_000, n - done)
            counts += np.histogram(mcsim.sample_selected_snr(cfg, rng, size=nb),
                                   bins=edges)[0]
            done += nb
        probs = np.array([cdf_gamma_rf(cfg, hi) - cdf_gamma_rf(cfg, lo)
                          for lo, hi in zip(edges[:-1], edges[1:])])
        se = np.sqrt(n * probs * (1.0 - probs))
        z = np.abs(counts - n * probs) / se
        assert float(z.max()) < 3.0


class TestConstants:
    def test_c_single_station(self):
        assert const_C(RfConfig(n_bs=1, m=1, mu_rf=10.0, rho=0.0)) == pytest.approx(
            11.0, rel=1e-12)
        assert const_C(RfConfig(n_bs=1, m=3, mu_rf=10.0, rho=0.5)) == pytest.approx(
            11.0, rel=1e-12)

    def test_c_uncorrelated_matches_single(self):
        for k in (2, 3):
            assert const_C(RfConfig(n_bs=k, m=2, mu_rf=7.0, rho=0.0)) == pytest.approx(
                8.0, rel=1e-11)

    def test_c_order_statistics(self):
        # mean of the max of two unit-mean exponentials is 3/2
        assert const_C(RfConfig(n_bs=2, m=1, mu_rf=4.0, rho=1.0)) == pytest.approx(
            7.0, rel=1e-11)

    def test_d_single_station(self):
        for m in GRID_KM:
            assert const_D(RfConfig(n_bs=1, m=m, mu_rf=13.0, rho=0.4)) == pytest.approx(
                float(m), rel=1e-11)

    def test_d_matches_qc_product_at_high_snr(self):
        for cfg in [RfConfig(2, 2, 1e8, 0.7), RfConfig(3, 1, 1e8, 0.9)]:
            q0 = cfg.m / cfg.mu_rf
            assert const_D(cfg) == pytest.approx(q0 * const_C(cfg), rel=1e-4)

    def test_d_order_statistics(self):
        assert const_D(RfConfig(n_bs=2, m=1, mu_rf=9.0, rho=1.0)) == pytest.approx(
            1.5, rel=1e-11)

    def test_d_independent_of_mean_snr(self):
        a = const_D(RfConfig(n_bs=3, m=2, mu_rf=2.0, rho=0.8))
        b = const_D(RfConfig(n_bs=3, m=2, mu_rf=2000.0, rho=0.8))
        assert a == pytest.approx(b, rel=1e-12)


class TestBerRf:
    def test_rayleigh_bpsk_closed_form(self):
        cfg = RfConfig(n_bs=1, m=1, mu_rf=10.0, rho=0.0)
        assert ber_rf(cfg, BPSK) == pytest.approx(RAYLEIGH_BPSK_MU10, rel=1e-11)

    def test_zero_snr_limit(self):
        cfg = RfConfig(n_bs=2, m=2, mu_rf=1e-9, rho=0.8)
        assert ber_rf(cfg, BPSK) == pytest.approx(0.5, abs=1e-4)

    def test_decreasing_in_mean_snr(self):
        vals = [ber_rf(RfConfig(n_bs=2, m=2, mu_rf=mu, rho=0.8), DBPSK)
                for mu in (1.0, 3.0, 10.0, 30.0, 100.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("cfg,mod", [
        (RfConfig(2, 2, 10.0, 0.8), DBPSK),
        (RfConfig(3, 2, 15.0, 0.5), BPSK),
        (RfConfig(2, 3, 8.0, 1.0), BPSK),
        (RfConfig(3, 1, 12.0, 0.9), DBPSK),
    ])
    def test_against_averaged_cdf_quadrature(self, cfg, mod):
        ref = oracles.quad_averaged_ber(lambda g: cdf_gamma_rf(cfg, g), mod.a, mod.b)
        assert ber_rf(cfg, mod) == pytest.approx(ref, rel=1e-6)


class TestMonteCarloEquivalence:
    def test_cdf_matches_empirical_quantiles(self):
        # every (n_bs, m, rho) combination, 1e7 samples, 20 anchor points,
        # 3 binomial standard errors
        n = 10_000_000
        levels = np.linspace(0.04, 0.96, 20)
        worst = 0.0
        for n_bs in GRID_KM:
            for m in GRID_KM:
                for rho in GRID_RHO:
                    cfg = RfConfig(n_bs=n_bs, m=m, mu_rf=5.0, rho=rho)
                    # anchors from the single-link law scaled by mean SNR
                    points = sp.gammaincinv(m, levels) * cfg.mu_rf / m
                    rng = np.random.Generator(
                        np.random.Philox(910_000 + 100 * n_bs + 10 * m + int(10 * rho)))
                    counts = np.zeros(points.size, dtype=np.int64)
                    done = 0
                    while done < n:
                        nb = min(2_500_000, n - done)
                        batch = np.sort(mcsim.sample_selected_snr(cfg, rng, size=nb))
                        counts += np.searchsorted(batch, points, side="right")
                        done += nb
                    analytic = np.array([cdf_gamma_rf(cfg, g) for g in points])
                    se = np.sqrt(analytic * (1.0 - analytic) / n)
                    z = np.abs(counts / n - analytic) / se
                    worst = max(worst, float(z.max()))
                    assert float(z.max()) < 3.0, (n_bs, m, rho, z.max())
        assert worst < 3.0
