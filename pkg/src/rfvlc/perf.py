"""End-to-end outage probability and average BER for the two-hop system.

The RF hop feeds the VLC hop through either a fixed-gain amplifying relay
(equivalent SNR g_rf * g_vlc / (g_vlc + C)) or a decode-and-forward relay
(equivalent SNR min(g_rf, g_vlc)). Exact metrics come from the closed-form
expansion of the selected-RF-link statistics combined with the geometric
VLC SNR law; asymptotic floors cover the three regimes of interest: RF SNR
growing large, LED power growing large, and both at once.

Numerical note: the exponential-integral / Meijer-G arguments scale like
1 / gamma_max, so they underflow when the LED power is huge. Past
EI_ARG_CROSSOVER the exact evaluators return the corresponding analytic
limit (the high-LED-power floor), which is where the expressions converge
anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np

from . import rf_link, specfun, vlc_link
from .specfun import DomainError, EvalTolerance, DEFAULT_TOL
from .rf_link import RfConfig
from .vlc_link import VlcConfig, VlcDerived

__all__ = [
    "RelayScheme",
    "AsymptoticRegime",
    "Modulation",
    "BPSK",
    "DBPSK",
    "PerfPoint",
    "EI_ARG_CROSSOVER",
    "outage_exact",
    "outage_asymptote",
    "ber_exact",
    "ber_asymptote",
    "evaluate_point",
]

# below this exponential-integral argument the exact closed forms switch to
# their high-LED-power limits (see module docstring)
EI_ARG_CROSSOVER = 1e-12


class RelayScheme(Enum):
    AF_FIXED_GAIN = "af"
    DF = "df"


class AsymptoticRegime(Enum):
    HIGH_RF_SNR = "rf_snr"
    HIGH_LED_POWER = "led_power"
    BOTH = "both"


@dataclass(frozen=True)
class Modulation:
    """Binary modulation with conditional BER Gamma(a, b gamma) / (2 Gamma(a))."""

    name: str
    a: float
    b: float

    def __post_init__(self) -> None:
        if (self.a, self.b) not in ((0.5, 1.0), (1.0, 1.0)):
            raise DomainError(
                f"unsupported modulation parameters (a={self.a}, b={self.b}); "
                "expected (0.5, 1) BPSK or (1, 1) DBPSK")


BPSK = Modulation("bpsk", 0.5, 1.0)
DBPSK = Modulation("dbpsk", 1.0, 1.0)


@dataclass(frozen=True)
class PerfPoint:
    """One evaluated operating point for a single relay scheme."""

    scheme: RelayScheme
    gamma_th: float
    outage_exact: float
    ber_exact: float
    outage_floor_rf_snr: Optional[float] = None
    outage_floor_led: Optional[float] = None
    outage_floor_both: Optional[float] = None
    ber_floor_rf_snr: Optional[float] = None
    ber_floor_led: Optional[float] = None
    ber_floor_both: Optional[float] = None
    mc_outage: Optional[Any] = None
    mc_ber: Optional[Any] = None


def _check_gamma_th(gamma_th: float) -> float:
    gamma_th = float(gamma_th)
    if not (math.isfinite(gamma_th) and gamma_th > 0.0):
        raise DomainError(f"gamma_th must be positive, got {gamma_th!r}")
    return gamma_th


def _clip_prob(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def _pow0(x: float, n: int) -> float:
    # 0^0 -> 1, matching the term-expansion convention at rho in {0, 1}
    return 1.0 if n == 0 else x ** n


def _vlc_prefactor(der: VlcDerived) -> float:
    w = der.lambertian_order
    return ((der.mu_vlc * der.gain_const ** 2) ** (1.0 / (w + 3.0))
            / (der.footprint_radius ** 2 * (w + 3.0)))


def _term_qc_limits(exp: rf_link.TermExpansion) -> np.ndarray:
    """Per-term limit of Q * C as mu_rf grows: Q_t * E[gamma_rf].

    The printed floor expressions carry a single constant for this product,
    but the product genuinely differs across expansion terms whenever rho > 0
    and more than one base station is present; keeping the per-term limit is
    what makes the floors match the exact curves (see decisions ledger).
    """
    mean_snr = rf_link.const_C(exp.config) - 1.0
    return exp.rates * mean_snr


# ---------------------------------------------------------------------------
# outage probability
# ---------------------------------------------------------------------------

def _outage_af_exact(rf: RfConfig, cfg: VlcConfig, der: VlcDerived,
                     gamma_th: float, tol: EvalTolerance) -> float:
    exp = rf_link.enumerate_terms(rf)
    c_gain = rf_link.const_C(rf)
    w = der.lambertian_order
    g_lo, g_hi = der.gamma_min, der.gamma_max

    if float(np.max(exp.rates)) * c_gain * gamma_th / g_hi < EI_ARG_CROSSOVER:
        return rf_link.cdf_gamma_rf(rf, gamma_th, tol)

    brackets: dict[tuple[float, int], float] = {}

    def bracket(rate: float, r: int) -> float:
        key = (rate, r)
        if key not in brackets:
            nu = (w + 2.0) / (w + 3.0) - r
            beta = 1.0 / (w + 3.0) + r
            arg = rate * c_gain * gamma_th
            brackets[key] = (
                g_hi ** (-beta) * specfun.gen_exponential_integral(nu, arg / g_hi, tol)
                - g_lo ** (-beta) * specfun.gen_exponential_integral(nu, arg / g_lo, tol))
        return brackets[key]

    total = 0.0
    for weight, shape, rate in zip(exp.weights, exp.shapes, exp.rates):
        n = int(shape)
        inner = 0.0
        for q in range(n):
            base = rate ** q * gamma_th ** q / math.factorial(q)
            for r in range(q + 1):
                inner += (specfun.binomial(q, r) * base * c_gain ** r
                          * bracket(rate, r))
        total += weight * math.exp(-rate * gamma_th) * inner
    return _clip_prob(1.0 - _vlc_prefactor(der) * total)


def outage_exact(scheme: RelayScheme, rf: RfConfig, vlc_cfg: VlcConfig,
                 vlc_der: VlcDerived, gamma_th: float,
                 tol: EvalTolerance = DEFAULT_TOL) -> float:
    """Exact end-to-end outage probability at linear threshold gamma_th."""
    gamma_th = _check_gamma_th(gamma_th)
    if scheme is RelayScheme.AF_FIXED_GAIN:
        return _outage_af_exact(rf, vlc_cfg, vlc_der, gamma_th, tol)
    f_rf = rf_link.cdf_gamma_rf(rf, gamma_th, tol)
    f_vlc = vlc_link.cdf_gamma_vlc(vlc_cfg, vlc_der, gamma_th)
    return _clip_prob(f_rf + f_vlc - f_rf * f_vlc)


def _outage_af_floor_rf_snr(rf: RfConfig, cfg: VlcConfig, der: VlcDerived,
                            gamma_th: float, tol: EvalTolerance) -> float:
    exp = rf_link.enumerate_terms(rf)
    qc = _term_qc_limits(exp)
    w = der.lambertian_order
    g_lo, g_hi = der.gamma_min, der.gamma_max

    if float(np.max(qc)) * gamma_th / g_hi < EI_ARG_CROSSOVER:
        return _outage_both(rf, gamma_th)

    total = 0.0
    for weight, shape, d_t in zip(exp.weights, exp.shapes, qc):
        n = int(shape)
        inner = 0.0
        for q in range(n):
            nu = (w + 2.0) / (w + 3.0) - q
            beta = 1.0 / (w + 3.0) + q
            arg = d_t * gamma_th
            br = (g_hi ** (-beta) * specfun.gen_exponential_integral(nu, arg / g_hi, tol)
                  - g_lo ** (-beta) * specfun.gen_exponential_integral(nu, arg / g_lo, tol))
            inner += arg ** q / math.factorial(q) * br
        total += weight * inner
    return _clip_prob(1.0 - _vlc_prefactor(der) * total)


def _outage_both(rf: RfConfig, gamma_th: float) -> float:
    """Deep-asymptote outage, identical for both relay schemes."""
    exp = rf_link.enumerate_terms(rf)
    m, mu, rho = rf.m, rf.mu_rf, rf.rho
    log_ratio = math.log(m * gamma_th / mu)
    total = 0.0
    for t in exp.terms:
        n = m + t.i
        rho_pow = (_pow0(rho, t.i) * _pow0(1.0 - rho, t.order - t.i)
                   * (1.0 + t.p * (1.0 - rho)) ** (-(t.order + n)))
        total += rf.n_bs * t.coeff * rho_pow * math.exp(n * log_ratio) / n
    return _clip_prob(total)


def outage_asymptote(scheme: RelayScheme, regime: AsymptoticRegime, rf: RfConfig,
                     vlc_cfg: VlcConfig, vlc_der: VlcDerived, gamma_th: float,
                     tol: EvalTolerance = DEFAULT_TOL) -> float:
    """Asymptotic outage floor for the requested regime."""
    gamma_th = _check_gamma_th(gamma_th)
    if regime is AsymptoticRegime.HIGH_LED_POWER:
        return rf_link.cdf_gamma_rf(rf, gamma_th, tol)
    if regime is AsymptoticRegime.BOTH:
        return _outage_both(rf, gamma_th)
    if scheme is RelayScheme.AF_FIXED_GAIN:
        return _outage_af_floor_rf_snr(rf, vlc_cfg, vlc_der, gamma_th, tol)
    return vlc_link.cdf_gamma_vlc(vlc_cfg, vlc_der, gamma_th)


# ---------------------------------------------------------------------------
# average BER
# ---------------------------------------------------------------------------

def _ber_af_exact(mod: Modulation, rf: RfConfig, cfg: VlcConfig,
                  der: VlcDerived, tol: EvalTolerance) -> float:
    a, b = mod.a, mod.b
    exp = rf_link.enumerate_terms(rf)
    c_gain = rf_link.const_C(rf)
    w = der.lambertian_order
    g_lo, g_hi = der.gamma_min, der.gamma_max

    rate_max = float(np.max(exp.rates))
    if rate_max * c_gain / (g_hi * (b + rate_max)) < EI_ARG_CROSSOVER:
        return rf_link.ber_rf(rf, mod, tol)

    total = 0.0
    for weight, shape, rate in zip(exp.weights, exp.shapes, exp.rates):
        n = int(shape)
        z_hi = rate * c_gain / (g_hi * (b + rate))
        z_lo = rate * c_gain / (g_lo * (b + rate))
        inner = 0.0
        for q in range(n):
            base = rate ** q / (math.factorial(q) * (b + rate) ** (a + q))
            for r in range(q + 1):
                nu = (w + 2.0) / (w + 3.0) - r
                beta = 1.0 / (w + 3.0) + r
                br = (g_hi ** (-beta)
                      * specfun.meijer_g_2122(1.0 - a - q, nu, nu - 1.0, 0.0, z_hi, tol)
                      - g_lo ** (-beta)
                      * specfun.meijer_g_2122(1.0 - a - q, nu, nu - 1.0, 0.0, z_lo, tol))
                inner += specfun.binomial(q, r) * base * c_gain ** r * br
        total += weight * inner
    value = 0.5 - b ** a / (2.0 * math.gamma(a)) * _vlc_prefactor(der) * total
    return min(max(value, 0.0), 0.5)


def ber_exact(scheme: RelayScheme, mod: Modulation, rf: RfConfig,
              vlc_cfg: VlcConfig, vlc_der: VlcDerived,
              tol: EvalTolerance = DEFAULT_TOL) -> float:
    """Exact end-to-end average BER."""
    if scheme is RelayScheme.AF_FIXED_GAIN:
        return _ber_af_exact(mod, rf, vlc_cfg, vlc_der, tol)
    p_rf = rf_link.ber_rf(rf, mod, tol)
    p_vlc = vlc_link.ber_vlc(vlc_cfg, vlc_der, mod, tol)
    return p_rf * (1.0 - p_vlc) + p_vlc * (1.0 - p_rf)


def _ber_af_floor_rf_snr(mod: Modulation, rf: RfConfig, cfg: VlcConfig,
                         der: VlcDerived, tol: EvalTolerance) -> float:
    a, b = mod.a, mod.b
    exp = rf_link.enumerate_terms(rf)
    qc = _term_qc_limits(exp)
    w = der.lambertian_order
    g_lo, g_hi = der.gamma_min, der.gamma_max

    if float(np.max(qc)) / (b * g_hi) < EI_ARG_CROSSOVER:
        return _ber_both(mod, rf)

    total = 0.0
    for weight, shape, d_t in zip(exp.weights, exp.shapes, qc):
        n = int(shape)
        inner = 0.0
        for q in range(n):
            nu = (w + 2.0) / (w + 3.0) - q
            beta = 1.0 / (w + 3.0) + q
            br = (g_hi ** (-beta)
                  * specfun.meijer_g_2122(1.0 - a - q, nu, nu - 1.0, 0.0,
                                          d_t / (b * g_hi), tol)
                  - g_lo ** (-beta)
                  * specfun.meijer_g_2122(1.0 - a - q, nu, nu - 1.0, 0.0,
                                          d_t / (b * g_lo), tol))
            inner += d_t ** q / (math.factorial(q) * b ** (a + q)) * br
        total += weight * inner
    value = 0.5 - b ** a / (2.0 * math.gamma(a)) * _vlc_prefactor(der) * total
    return min(max(value, 0.0), 0.5)


def _ber_both(mod: Modulation, rf: RfConfig) -> float:
    """Deep-asymptote BER, identical for both relay schemes."""
    a, b = mod.a, mod.b
    exp = rf_link.enumerate_terms(rf)
    m, mu, rho = rf.m, rf.mu_rf, rf.rho
    log_ratio = math.log(m / (b * mu))
    total = 0.0
    for t in exp.terms:
        n = m + t.i
        rho_pow = (_pow0(rho, t.i) * _pow0(1.0 - rho, t.order - t.i)
                   * (1.0 + t.p * (1.0 - rho)) ** (-(t.order + n)))
        total += (rf.n_bs * t.coeff * rho_pow
                  * math.exp(math.lgamma(a + n) + n * log_ratio) / n)
    return min(max(total / (2.0 * math.gamma(a)), 0.0), 0.5)


def ber_asymptote(scheme: RelayScheme, regime: AsymptoticRegime, mod: Modulation,
                  rf: RfConfig, vlc_cfg: VlcConfig, vlc_der: VlcDerived,
                  tol: EvalTolerance = DEFAULT_TOL) -> float:
    """Asymptotic BER floor for the requested regime."""
    if regime is AsymptoticRegime.HIGH_LED_POWER:
        return rf_link.ber_rf(rf, mod, tol)
    if regime is AsymptoticRegime.BOTH:
        return _ber_both(mod, rf)
    if scheme is RelayScheme.AF_FIXED_GAIN:
        return _ber_af_floor_rf_snr(mod, rf, vlc_cfg, vlc_der, tol)
    return vlc_link.ber_vlc(vlc_cfg, vlc_der, mod, tol)


def evaluate_point(scheme: RelayScheme, mod: Modulation, rf: RfConfig,
                   vlc_cfg: VlcConfig, vlc_der: VlcDerived, gamma_th: float,
                   with_floors: bool = False,
                   tol: EvalTolerance = DEFAULT_TOL) -> PerfPoint:
    """Evaluate exact metrics (and optionally all floors) at one operating point."""
    floors = {}
    if with_floors:
        floors = dict(
            outage_floor_rf_snr=outage_asymptote(
                scheme, AsymptoticRegime.HIGH_RF_SNR, rf, vlc_cfg, vlc_der, gamma_th, tol),
            outage_floor_led=outage_asymptote(
                scheme, AsymptoticRegime.HIGH_LED_POWER, rf, vlc_cfg, vlc_der, gamma_th, tol),
            outage_floor_both=outage_asymptote(
                scheme, AsymptoticRegime.BOTH, rf, vlc_cfg, vlc_der, gamma_th, tol),
            ber_floor_rf_snr=ber_asymptote(
                scheme, AsymptoticRegime.HIGH_RF_SNR, mod, rf, vlc_cfg, vlc_der, tol),
            ber_floor_led=ber_asymptote(
                scheme, AsymptoticRegime.HIGH_LED_POWER, mod, rf, vlc_cfg, vlc_der, tol),
            ber_floor_both=ber_asymptote(
                scheme, AsymptoticRegime.BOTH, mod, rf, vlc_cfg, vlc_der, tol),
        )
    return PerfPoint(
        scheme=scheme,
        gamma_th=gamma_th,
        outage_exact=outage_exact(scheme, rf, vlc_cfg, vlc_der, gamma_th, tol),
        ber_exact=ber_exact(scheme, mod, rf, vlc_cfg, vlc_der, tol),
        **floors,
    )
