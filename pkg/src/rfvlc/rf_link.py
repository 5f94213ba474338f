"""Statistics of the selected RF backhaul link under outdated CSI.

Each of the candidate base-station links fades independently with a
Nakagami-m law (integer m), so the per-link SNR is gamma distributed with
shape m and mean mu_rf. The serving link is the one whose *estimated* SNR
is largest; estimate and actual SNR are correlated with coefficient rho.
The resulting selected-SNR density and distribution are finite mixtures of
gamma terms; this module builds that term expansion once and evaluates
PDF/CDF, the fixed-gain constants and the RF-only average BER from it.

All SNR quantities are linear power ratios (dB conversion is a CLI concern).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import specfun
from .specfun import DomainError, EvalTolerance, DEFAULT_TOL

__all__ = [
    "CapacityError",
    "RfConfig",
    "Term",
    "TermExpansion",
    "TERM_CAP",
    "enumerate_terms",
    "cdf_gamma_rf",
    "pdf_gamma_rf",
    "const_C",
    "const_D",
    "ber_rf",
]

# refuse expansions beyond this many (p, tuple, i) terms
TERM_CAP = 1_000_000


class CapacityError(ValueError):
    """The (n_bs, m) combination expands past the configured term cap."""


@dataclass(frozen=True)
class RfConfig:
    """RF subsystem parameters.

    n_bs:   number of candidate base stations (selection order)
    m:      integer Nakagami fading parameter
    mu_rf:  average per-link SNR, linear (equals P_s / sigma_r^2)
    rho:    correlation between estimated and actual SNR, in [0, 1]
    """

    n_bs: int
    m: int
    mu_rf: float
    rho: float

    def __post_init__(self) -> None:
        if not (isinstance(self.n_bs, int) and self.n_bs >= 1):
            raise DomainError(f"n_bs must be a positive integer, got {self.n_bs!r}")
        if not (isinstance(self.m, int) and self.m >= 1):
            raise DomainError(f"m must be a positive integer, got {self.m!r}")
        if not (math.isfinite(self.mu_rf) and self.mu_rf > 0.0):
            raise DomainError(f"mu_rf must be positive, got {self.mu_rf!r}")
        if not (0.0 <= self.rho <= 1.0):
            raise DomainError(f"rho must lie in [0, 1], got {self.rho!r}")

    @property
    def ps_over_sigma2(self) -> float:
        """Transmit power over relay noise variance; alias of mu_rf."""
        return self.mu_rf


@dataclass(frozen=True)
class Term:
    """One gamma-mixture term of the selected-SNR expansion.

    p:      selection-order index, 0 .. n_bs - 1
    parts:  composition (l_0, ..., l_{m-1}) of p into m nonnegative parts
    order:  B = sum_j j * l_j
    i:      inner mixture index, 0 .. B
    coeff:  signed coefficient A (computed in the log domain, then signed)
    rate:   gamma rate Q = m (1 + p) / ((1 + p (1 - rho)) mu_rf)
    """

    p: int
    parts: tuple[int, ...]
    order: int
    i: int
    coeff: float
    rate: float


def _pow0(x: float, n: int) -> float:
    # 0^0 -> 1: the rho = 0 / rho = 1 degeneracies are limits of the expansion
    return 1.0 if n == 0 else x ** n


@dataclass(frozen=True)
class TermExpansion:
    """Immutable term expansion plus precomputed per-term evaluation arrays.

    weights[t] collects everything multiplying the regularized incomplete
    gamma in the CDF: n_bs * A * rho^i (1-rho)^(B-i) Gamma(m+i) /
    ((1 + p(1-rho))^B (1 + p)^(m+i)). The weights sum to one.
    """

    config: RfConfig
    terms: tuple[Term, ...]
    weights: np.ndarray = field(repr=False)
    shapes: np.ndarray = field(repr=False)
    rates: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.weights.setflags(write=False)
        self.shapes.setflags(write=False)
        self.rates.setflags(write=False)


def _compositions(total: int, parts: int):
    """All `parts`-tuples of nonnegative integers summing to `total`, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _expansion_size(n_bs: int, m: int) -> int:
    total = 0
    for p in range(n_bs):
        for parts in _compositions(p, m):
            total += sum(j * l for j, l in enumerate(parts)) + 1
            if total > TERM_CAP:
                return total
    return total


@lru_cache(maxsize=128)
def enumerate_terms(cfg: RfConfig) -> TermExpansion:
    """Build the selected-SNR term expansion for a configuration.

    Deterministic ordering: lexicographic in (p, parts, i). Raises
    CapacityError when the expansion would exceed TERM_CAP terms.
    """
    n_bs, m, mu, rho = cfg.n_bs, cfg.m, cfg.mu_rf, cfg.rho
    if _expansion_size(n_bs, m) > TERM_CAP:
        raise CapacityError(
            f"term expansion for n_bs={n_bs}, m={m} exceeds cap of {TERM_CAP}")

    lg_m = math.lgamma(m)
    terms: list[Term] = []
    weights: list[float] = []
    shapes: list[int] = []
    rates: list[float] = []
    for p in range(n_bs):
        log_binom_p = specfun.log_binomial(n_bs - 1, p)
        rate = m * (1 + p) / ((1.0 + p * (1.0 - rho)) * mu)
        sign = -1.0 if p % 2 else 1.0
        for parts in _compositions(p, m):
            order = sum(j * l for j, l in enumerate(parts))
            log_multi = specfun.log_multinomial(p, parts)
            log_fact = sum(l * math.lgamma(j + 1.0) for j, l in enumerate(parts))
            for i in range(order + 1):
                log_a = (log_binom_p + log_multi
                         + math.lgamma(m + order) + math.lgamma(order + 1.0)
                         - math.lgamma(i + 1.0) - lg_m - math.lgamma(m + i)
                         - math.lgamma(order - i + 1.0) - log_fact)
                coeff = sign * math.exp(log_a)
                terms.append(Term(p=p, parts=parts, order=order, i=i,
                                  coeff=coeff, rate=rate))
                weight = (n_bs * coeff * _pow0(rho, i) * _pow0(1.0 - rho, order - i)
                          * math.exp(math.lgamma(m + i))
                          / ((1.0 + p * (1.0 - rho)) ** order * (1.0 + p) ** (m + i)))
                weights.append(weight)
                shapes.append(m + i)
                rates.append(rate)
    return TermExpansion(config=cfg,
                         terms=tuple(terms),
                         weights=np.asarray(weights, dtype=float),
                         shapes=np.asarray(shapes, dtype=float),
                         rates=np.asarray(rates, dtype=float))


def cdf_gamma_rf(cfg: RfConfig, gamma: float, tol: EvalTolerance = DEFAULT_TOL) -> float:
    """CDF of the selected-link SNR at linear threshold gamma >= 0."""
    gamma = float(gamma)
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise DomainError(f"gamma must be nonnegative, got {gamma!r}")
    if gamma == 0.0:
        return 0.0
    exp = enumerate_terms(cfg)
    acc = 1.0
    for w, s, r in zip(exp.weights, exp.shapes, exp.rates):
        acc -= w * specfun.upper_incomplete_gamma_regularized(s, r * gamma, tol)
    return min(max(acc, 0.0), 1.0)


def pdf_gamma_rf(cfg: RfConfig, gamma: float) -> float:
    """PDF of the selected-link SNR at gamma > 0."""
    gamma = float(gamma)
    if not (math.isfinite(gamma) and gamma > 0.0):
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    exp = enumerate_terms(cfg)
    log_g = math.log(gamma)
    acc = 0.0
    for w, s, r in zip(exp.weights, exp.shapes, exp.rates):
        # w times the Gamma(shape=s, rate=r) density
        acc += w * math.exp(s * math.log(r) + (s - 1.0) * log_g
                            - r * gamma - math.lgamma(s))
    return max(acc, 0.0)


def const_C(cfg: RfConfig) -> float:
    """Fixed-gain relay constant C = E[gamma_rf] + 1."""
    exp = enumerate_terms(cfg)
    return 1.0 + float(np.sum(exp.weights * exp.shapes / exp.rates))


def const_D(cfg: RfConfig) -> float:
    """High-SNR limit of Q(p=0) * C, i.e. m * E[gamma_rf] / mu_rf.

    Independent of mu_rf; equals m when selection is uninformative (rho = 0
    or a single base station). The floor evaluators rescale this per term,
    see perf._term_qc_limits.
    """
    return cfg.m * (const_C(cfg) - 1.0) / cfg.mu_rf


def ber_rf(cfg: RfConfig, mod, tol: EvalTolerance = DEFAULT_TOL) -> float:
    """Average BER of the RF hop alone for a modulation with conditional
    error rate Gamma(a, b gamma) / (2 Gamma(a))."""
    a, b = float(mod.a), float(mod.b)
    exp = enumerate_terms(cfg)
    acc = 0.5
    for w, s, r in zip(exp.weights, exp.shapes, exp.rates):
        g = specfun.meijer_g_2122(1.0 - a, 1.0, 0.0, float(s), r / b, tol)
        # weights already carry Gamma(m+i); divide it back out of G
        acc -= 0.5 / math.gamma(a) * w * g * math.exp(-math.lgamma(s))
    return min(max(acc, 0.0), 0.5)
