"""Geometry-dependent indoor VLC channel.

A single LED lamp points straight down from height L; its emission follows
a generalized Lambertian pattern whose order is set by the semi-angle at
half illuminance. The user terminal sits at a uniformly random radius
inside the lighting footprint with the photodetector parallel to the
ground, so the line-of-sight DC gain, and through it the electrical SNR,
is a deterministic function of that radius. This module derives the
constants of that mapping and provides the SNR density, distribution and
the VLC-only average BER.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import specfun
from .specfun import DomainError, EvalTolerance, DEFAULT_TOL

__all__ = [
    "FovCoverageWarning",
    "VlcConfig",
    "VlcDerived",
    "derive",
    "dc_gain",
    "pdf_gamma_vlc",
    "cdf_gamma_vlc",
    "ber_vlc",
]


class FovCoverageWarning(UserWarning):
    """Incidence angle at the footprint edge exceeds the receiver FOV."""


@dataclass(frozen=True)
class VlcConfig:
    """VLC geometry, optics and noise parameters (SI units).

    Defaults reproduce the reference indoor setup: 1 cm^2 photodetector,
    0.4 A/W responsivity, unit filter gain, 1.5 lens index, 90 deg FOV,
    60 deg semi-angle, 2 m lamp height, 0.8 conversion efficiency,
    1e-21 W/Hz noise PSD, 20 MHz bandwidth and five 0.452 W LEDs.
    """

    area_pd: float = 1e-4          # photodetector area [m^2]
    responsivity: float = 0.4      # [A/W]
    filter_gain: float = 1.0
    refractive_index: float = 1.5
    fov: float = math.pi / 2       # receiver field of view [rad]
    semi_angle: float = math.pi / 3  # LED semi-angle at half illuminance [rad]
    height: float = 2.0            # lamp height above receiving plane [m]
    conv_eff: float = 0.8          # optical-to-electrical conversion efficiency
    noise_psd: float = 1e-21       # [W/Hz]
    bandwidth: float = 2e7         # [Hz]
    n_leds: int = 5
    led_power: float = 0.452       # optical output power per LED [W]

    def __post_init__(self) -> None:
        positive = [
            ("area_pd", self.area_pd), ("responsivity", self.responsivity),
            ("filter_gain", self.filter_gain), ("refractive_index", self.refractive_index),
            ("height", self.height), ("conv_eff", self.conv_eff),
            ("noise_psd", self.noise_psd), ("bandwidth", self.bandwidth),
            ("led_power", self.led_power),
        ]
        for name, value in positive:
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be positive, got {value!r}")
        if not (isinstance(self.n_leds, int) and self.n_leds >= 1):
            raise DomainError(f"n_leds must be a positive integer, got {self.n_leds!r}")
        if not 0.0 < self.semi_angle < math.pi / 2:
            raise DomainError(
                f"semi_angle must lie in (0, pi/2) rad, got {self.semi_angle!r}")
        if not 0.0 < self.fov <= math.pi / 2:
            raise DomainError(f"fov must lie in (0, pi/2] rad, got {self.fov!r}")

    @property
    def p_total(self) -> float:
        """Total lamp optical power P_t = n_leds * led_power [W]."""
        return self.n_leds * self.led_power


@dataclass(frozen=True)
class VlcDerived:
    """Constants derived from a VlcConfig."""

    lambertian_order: float   # w
    footprint_radius: float   # r_w = L tan(semi_angle) [m]
    concentrator_gain: float  # refractive_index^2 / sin^2(fov)
    gain_const: float         # numerator of the gain law I = X / (r^2+L^2)^((w+3)/2)
    sigma_d2: float           # receiver noise variance [W]
    mu_vlc: float             # (P_t eta)^2 / sigma_d2
    gamma_min: float          # SNR at the footprint edge
    gamma_max: float          # SNR directly under the lamp

    @property
    def support_ratio(self) -> float:
        """gamma_max / gamma_min = ((r_w^2 + L^2) / L^2)^(w+3)."""
        return self.gamma_max / self.gamma_min


def derive(cfg: VlcConfig) -> VlcDerived:
    """Populate the derived constants; warns if the footprint edge falls
    outside the receiver FOV (the gain law assumes it never does)."""
    w = -math.log(2.0) / math.log(math.cos(cfg.semi_angle))
    r_w = cfg.height * math.tan(cfg.semi_angle)
    if math.atan2(r_w, cfg.height) > cfg.fov:
        warnings.warn(
            f"footprint edge incidence angle {math.degrees(math.atan2(r_w, cfg.height)):.1f} deg "
            f"exceeds the receiver FOV {math.degrees(cfg.fov):.1f} deg; "
            "the gain model does not clip out-of-FOV positions",
            FovCoverageWarning, stacklevel=2)
    g = cfg.refractive_index ** 2 / math.sin(cfg.fov) ** 2
    gain_const = (cfg.area_pd * (w + 1.0) * cfg.responsivity / (2.0 * math.pi)
                  * cfg.filter_gain * g * cfg.height ** (w + 1.0))
    sigma_d2 = cfg.noise_psd * cfg.bandwidth
    mu_vlc = (cfg.p_total * cfg.conv_eff) ** 2 / sigma_d2
    span = r_w ** 2 + cfg.height ** 2
    gamma_min = mu_vlc * gain_const ** 2 / span ** (w + 3.0)
    gamma_max = mu_vlc * gain_const ** 2 / cfg.height ** (2.0 * (w + 3.0))
    return VlcDerived(lambertian_order=w, footprint_radius=r_w,
                      concentrator_gain=g, gain_const=gain_const,
                      sigma_d2=sigma_d2, mu_vlc=mu_vlc,
                      gamma_min=gamma_min, gamma_max=gamma_max)


def dc_gain(cfg: VlcConfig, derived: VlcDerived, r: float) -> float:
    """LoS DC channel gain at ground radius r, 0 <= r <= footprint radius."""
    r = float(r)
    if not (0.0 <= r <= derived.footprint_radius):
        raise DomainError(
            f"radius {r!r} outside footprint [0, {derived.footprint_radius}]")
    w = derived.lambertian_order
    return derived.gain_const / (r * r + cfg.height ** 2) ** (0.5 * (w + 3.0))


def pdf_gamma_vlc(cfg: VlcConfig, derived: VlcDerived, gamma: float) -> float:
    """PDF of the user SNR on its support [gamma_min, gamma_max]."""
    gamma = float(gamma)
    if not (derived.gamma_min <= gamma <= derived.gamma_max):
        raise DomainError(
            f"gamma {gamma!r} outside support "
            f"[{derived.gamma_min}, {derived.gamma_max}]")
    w = derived.lambertian_order
    scale = (derived.mu_vlc * derived.gain_const ** 2) ** (1.0 / (w + 3.0))
    return (scale / (derived.footprint_radius ** 2 * (w + 3.0))
            * gamma ** (-(w + 4.0) / (w + 3.0)))


def cdf_gamma_vlc(cfg: VlcConfig, derived: VlcDerived, gamma: float) -> float:
    """CDF of the user SNR; 0 below the support, 1 above it."""
    gamma = float(gamma)
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise DomainError(f"gamma must be nonnegative, got {gamma!r}")
    if gamma < derived.gamma_min:
        return 0.0
    if gamma > derived.gamma_max:
        return 1.0
    w = derived.lambertian_order
    r_w2 = derived.footprint_radius ** 2
    l2 = cfg.height ** 2
    value = (1.0 + l2 / r_w2
             - (derived.mu_vlc * derived.gain_const ** 2 / gamma) ** (1.0 / (w + 3.0)) / r_w2)
    return min(max(value, 0.0), 1.0)


def ber_vlc(cfg: VlcConfig, derived: VlcDerived, mod,
            tol: EvalTolerance = DEFAULT_TOL) -> float:
    """Average BER of the VLC hop alone for a modulation with conditional
    error rate Gamma(a, b gamma) / (2 Gamma(a))."""
    a, b = float(mod.a), float(mod.b)
    w = derived.lambertian_order
    r_w2 = derived.footprint_radius ** 2
    g_lo, g_hi = b * derived.gamma_min, b * derived.gamma_max
    two_gamma_a = 2.0 * math.gamma(a)

    upper_hi = specfun.upper_incomplete_gamma(a, g_hi, tol)
    upper_lo = specfun.upper_incomplete_gamma(a, g_lo, tol)
    a_frac = a - 1.0 / (w + 3.0)
    frac_lo = specfun.upper_incomplete_gamma(a_frac, g_lo, tol)
    frac_hi = specfun.upper_incomplete_gamma(a_frac, g_hi, tol)

    value = (upper_hi / two_gamma_a
             + (1.0 + cfg.height ** 2 / r_w2) / two_gamma_a * (upper_lo - upper_hi)
             - (b * derived.mu_vlc * derived.gain_const ** 2) ** (1.0 / (w + 3.0))
             / (two_gamma_a * r_w2) * (frac_lo - frac_hi))
    return min(max(value, 0.0), 0.5)
