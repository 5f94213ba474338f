"""Sweep runner and figure-reproduction front end.

Subcommands:
  sweep     evaluate exact metrics / floors / Monte Carlo estimates across a
            parameter grid and emit one CSV row per grid point
  validate  run the analytic-vs-Monte-Carlo agreement grid; exit 0 only if
            every pair agrees within 3 standard errors
  explain   print every derived constant for a configuration

Configuration is declarative TOML with flat keys (full list in KEY_SPECS);
unknown keys are rejected and semantic violations are reported exhaustively,
not first-only. All dB / dBm conversion happens here: the library works in
linear SNR and watts throughout. mu_rf_db is a power ratio in dB; LED power
sweeps use dBm (absolute).

Figure presets (fig3..fig9) bundle fixed parameters for the standard
sweep axes of this system's performance curves. Parameters a preset pins
without an authoritative value are assumptions, flagged in PRESET_NOTES;
presets are starting points, not ground truth.

Exit codes: 0 success, 1 validation failure, 2 usage/config error (with a
machine-readable JSON object on stderr).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from . import mcsim, perf, rf_link, vlc_link
from .mcsim import SimConfig
from .perf import AsymptoticRegime, BPSK, DBPSK, Modulation, RelayScheme
from .rf_link import RfConfig
from .vlc_link import VlcConfig

__all__ = [
    "ConfigError",
    "Scenario",
    "SweepVariable",
    "SweepSpec",
    "KEY_SPECS",
    "PRESETS",
    "VALIDATION_GRIDS",
    "load_config",
    "build_scenario",
    "derived_constants",
    "sweep_values",
    "run_sweep",
    "rows_to_csv",
    "run_validation",
    "main",
]

MAX_GRID_POINTS = 10_000


class ConfigError(ValueError):
    """Invalid configuration; carries the full list of violations."""

    def __init__(self, messages: Sequence[str]):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


def _db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _check_int(value, lo=None):
    if isinstance(value, bool) or not isinstance(value, int):
        return None
    if lo is not None and value < lo:
        return None
    return value


def _check_float(value, lo=None, hi=None, lo_open=False, hi_open=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    value = float(value)
    if not math.isfinite(value):
        return None
    if lo is not None and (value <= lo if lo_open else value < lo):
        return None
    if hi is not None and (value >= hi if hi_open else value > hi):
        return None
    return value


# key -> (default, converter returning canonical value or None, human-readable bound)
KEY_SPECS = {
    "n_bs":            (2,      lambda v: _check_int(v, 1), "positive integer"),
    "m":               (2,      lambda v: _check_int(v, 1), "positive integer"),
    "mu_rf_db":        (15.0,   lambda v: _check_float(v), "finite dB value"),
    "rho":             (0.9,    lambda v: _check_float(v, 0.0, 1.0), "within [0, 1]"),
    "phi_half_deg":    (60.0,   lambda v: _check_float(v, 0.0, 90.0, True, True),
                        "within (0, 90) degrees"),
    "fov_deg":         (90.0,   lambda v: _check_float(v, 0.0, 90.0, True, False),
                        "within (0, 90] degrees"),
    "height_m":        (2.0,    lambda v: _check_float(v, 0.0, None, True), "positive"),
    "n_leds":          (5,      lambda v: _check_int(v, 1), "positive integer"),
    "led_power_w":     (0.452,  lambda v: _check_float(v, 0.0, None, True), "positive"),
    "area_pd_m2":      (1e-4,   lambda v: _check_float(v, 0.0, None, True), "positive"),
    "responsivity_a_w": (0.4,   lambda v: _check_float(v, 0.0, None, True), "positive"),
    "filter_gain":     (1.0,    lambda v: _check_float(v, 0.0, None, True), "positive"),
    "refractive_index": (1.5,   lambda v: _check_float(v, 0.0, None, True), "positive"),
    "conv_eff":        (0.8,    lambda v: _check_float(v, 0.0, None, True), "positive"),
    "noise_psd_w_hz":  (1e-21,  lambda v: _check_float(v, 0.0, None, True), "positive"),
    "bandwidth_hz":    (2e7,    lambda v: _check_float(v, 0.0, None, True), "positive"),
    "modulation":      ("bpsk", lambda v: v if v in ("bpsk", "dbpsk") else None,
                        "one of 'bpsk', 'dbpsk'"),
    "gamma_th_db":     (0.0,    lambda v: _check_float(v), "finite dB value"),
    "n_samples":       (1_000_000, lambda v: _check_int(v, 1), "positive integer"),
    "seed":            (1234,   lambda v: _check_int(v, 0), "nonnegative integer"),
    "n_streams":       (8,      lambda v: _check_int(v, 1), "positive integer"),
    "batch_size":      (1_000_000, lambda v: _check_int(v, 1), "positive integer"),
}

# Preset fixed-parameter bundles, one per standard curve family. Values the
# curve definitions leave open are assumptions, flagged in PRESET_NOTES.
PRESETS = {
    "fig3": {"n_bs": 2, "m": 2, "rho": 0.9, "mu_rf_db": 15.0, "phi_half_deg": 60.0,
             "height_m": 2.0, "gamma_th_db": 0.0},
    "fig4": {"n_bs": 3, "m": 2, "rho": 0.9, "n_leds": 2, "phi_half_deg": 60.0,
             "height_m": 2.0, "gamma_th_db": 0.0},
    "fig5": {"n_bs": 2, "m": 2, "rho": 0.9, "mu_rf_db": 15.0, "n_leds": 3,
             "phi_half_deg": 60.0, "modulation": "bpsk"},
    "fig6": {"n_bs": 2, "m": 2, "rho": 0.9, "mu_rf_db": 15.0, "phi_half_deg": 60.0,
             "height_m": 2.5, "modulation": "bpsk"},
    "fig7": {"n_bs": 2, "m": 2, "rho": 0.9, "mu_rf_db": 15.0, "n_leds": 3,
             "height_m": 2.0, "modulation": "bpsk"},
    "fig8": {"n_bs": 2, "m": 2, "rho": 0.9, "phi_half_deg": 60.0, "height_m": 2.0,
             "gamma_th_db": 0.0},
    "fig9": {"n_bs": 2, "m": 2, "rho": 0.9, "phi_half_deg": 60.0, "height_m": 2.0,
             "modulation": "bpsk"},
}

PRESET_NOTES = {
    "fig3": "outage vs LED power; fixed mu_rf and gamma_th are assumptions",
    "fig4": "outage vs RF SNR; lamp of 2 LEDs assumed",
    "fig5": "BER vs lamp height; mu_rf and lamp size assumed",
    "fig6": "BER vs LED power; mu_rf assumed",
    "fig7": "BER vs semi-angle; mu_rf and lamp size assumed",
    "fig8": "outage vs joint RF-SNR/LED-power axis; sweep either variable",
    "fig9": "BER vs joint RF-SNR/LED-power axis; sweep either variable",
}


@dataclass(frozen=True)
class Scenario:
    """Fully resolved operating point: RF + VLC configs, modulation,
    linear outage threshold and simulation settings."""

    rf: RfConfig
    vlc: VlcConfig
    modulation: Modulation
    gamma_th: float
    sim: SimConfig

    @property
    def vlc_derived(self) -> vlc_link.VlcDerived:
        return vlc_link.derive(self.vlc)


def merge_keys(base: dict, overrides: dict, origin: str,
               errors: Optional[list] = None) -> dict:
    """Overlay raw key/value pairs, rejecting unknown keys exhaustively.

    With an `errors` list the unknown-key messages are accumulated there (so
    later semantic checks still run and every violation is reported at once);
    without one they raise immediately.
    """
    unknown = [f"{origin}: unknown key '{k}'" for k in sorted(set(overrides) - set(KEY_SPECS))]
    if unknown and errors is None:
        raise ConfigError(unknown)
    if unknown:
        errors.extend(unknown)
    merged = dict(base)
    merged.update({k: v for k, v in overrides.items() if k in KEY_SPECS})
    return merged


def validate_keys(raw: dict, origin: str = "config",
                  errors: Optional[list] = None) -> dict:
    """Type/range-check every key; collects all violations before raising."""
    found = [] if errors is None else errors
    clean = {}
    for key, value in raw.items():
        _, convert, bound = KEY_SPECS[key]
        converted = convert(value)
        if converted is None:
            found.append(f"{origin}: {key} = {value!r} violates bound: {bound}")
        else:
            clean[key] = converted
    if found and errors is None:
        raise ConfigError(found)
    return clean


def default_keys() -> dict:
    return {key: spec[0] for key, spec in KEY_SPECS.items()}


def load_config(path: Optional[str] = None, preset: Optional[str] = None,
                overrides: Optional[dict] = None) -> dict:
    """Resolve the raw key dictionary: defaults <- preset <- file <- overrides.

    An empty (or absent) file yields the full default configuration.
    """
    errors: list[str] = []
    raw = default_keys()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError([f"unknown preset '{preset}'; choose from "
                               f"{', '.join(sorted(PRESETS))}"])
        raw = merge_keys(raw, PRESETS[preset], f"preset {preset}", errors)
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError([f"config file not found: {path}"])
        except tomllib.TOMLDecodeError as exc:
            # tomllib reports line/column in the message
            raise ConfigError([f"{path}: parse error: {exc}"])
        raw = merge_keys(raw, data, path, errors)
    if overrides:
        raw = merge_keys(raw, overrides, "command line", errors)
    clean = validate_keys(raw, errors=errors)
    if errors:
        raise ConfigError(errors)
    return clean


def build_scenario(raw: dict) -> Scenario:
    """Turn a validated raw key dict into library configs (linear units)."""
    rf = RfConfig(n_bs=raw["n_bs"], m=raw["m"],
                  mu_rf=_db_to_linear(raw["mu_rf_db"]), rho=raw["rho"])
    vlc = VlcConfig(
        area_pd=raw["area_pd_m2"],
        responsivity=raw["responsivity_a_w"],
        filter_gain=raw["filter_gain"],
        refractive_index=raw["refractive_index"],
        fov=math.radians(raw["fov_deg"]),
        semi_angle=math.radians(raw["phi_half_deg"]),
        height=raw["height_m"],
        conv_eff=raw["conv_eff"],
        noise_psd=raw["noise_psd_w_hz"],
        bandwidth=raw["bandwidth_hz"],
        n_leds=raw["n_leds"],
        led_power=raw["led_power_w"],
    )
    mod = BPSK if raw["modulation"] == "bpsk" else DBPSK
    sim = SimConfig(n_samples=raw["n_samples"], seed=raw["seed"],
                    n_streams=raw["n_streams"], batch_size=raw["batch_size"])
    return Scenario(rf=rf, vlc=vlc, modulation=mod,
                    gamma_th=_db_to_linear(raw["gamma_th_db"]), sim=sim)


def derived_constants(scenario: Scenario) -> dict[str, float]:
    """Every derived constant a hand-check needs, in evaluation order."""
    der = scenario.vlc_derived
    return {
        "w": der.lambertian_order,
        "r_w_m": der.footprint_radius,
        "concentrator_gain": der.concentrator_gain,
        "x_const": der.gain_const,
        "p_total_w": scenario.vlc.p_total,
        "sigma_d2_w": der.sigma_d2,
        "mu_vlc": der.mu_vlc,
        "gamma_min": der.gamma_min,
        "gamma_max": der.gamma_max,
        "c_fixed_gain": rf_link.const_C(scenario.rf),
        "d_limit": rf_link.const_D(scenario.rf),
        "gamma_th": scenario.gamma_th,
    }


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

class SweepVariable(Enum):
    PT_DBM = "pt_dbm"
    MU_RF_DB = "mu_rf_db"
    L_M = "l_m"
    SEMI_ANGLE_DEG = "semi_angle_deg"
    RHO = "rho"
    K = "k"


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a variable, an inclusive linear grid and the fixed scenario."""

    variable: SweepVariable
    start: float
    stop: float
    step: float
    scenario: Scenario
    outputs: frozenset = frozenset({"exact"})

    def __post_init__(self) -> None:
        errors = []
        if not self.start < self.stop:
            errors.append(f"sweep start {self.start} must be < stop {self.stop}")
        if not self.step > 0.0:
            errors.append(f"sweep step {self.step} must be positive")
        bad = self.outputs - {"exact", "floors", "mc"}
        if bad:
            errors.append(f"unknown outputs: {sorted(bad)}")
        if not errors and len(sweep_values(self)) > MAX_GRID_POINTS:
            errors.append(f"sweep grid exceeds {MAX_GRID_POINTS} points")
        if errors:
            raise ConfigError(errors)


def sweep_values(spec: SweepSpec) -> list[float]:
    values = []
    k = 0
    while True:
        v = spec.start + k * spec.step
        if v > spec.stop + 1e-9 * max(1.0, abs(spec.stop)):
            break
        values.append(v)
        k += 1
    return values


def _apply_variable(scenario: Scenario, variable: SweepVariable, value: float) -> Scenario:
    if variable is SweepVariable.PT_DBM:
        watts = _dbm_to_watt(value)
        vlc = dataclasses.replace(scenario.vlc, led_power=watts / scenario.vlc.n_leds)
        return dataclasses.replace(scenario, vlc=vlc)
    if variable is SweepVariable.MU_RF_DB:
        rf = dataclasses.replace(scenario.rf, mu_rf=_db_to_linear(value))
        return dataclasses.replace(scenario, rf=rf)
    if variable is SweepVariable.L_M:
        return dataclasses.replace(
            scenario, vlc=dataclasses.replace(scenario.vlc, height=value))
    if variable is SweepVariable.SEMI_ANGLE_DEG:
        return dataclasses.replace(
            scenario, vlc=dataclasses.replace(scenario.vlc, semi_angle=math.radians(value)))
    if variable is SweepVariable.RHO:
        return dataclasses.replace(
            scenario, rf=dataclasses.replace(scenario.rf, rho=value))
    if variable is SweepVariable.K:
        if abs(value - round(value)) > 1e-9 or round(value) < 1:
            raise ConfigError([f"K sweep value {value} is not a positive integer"])
        return dataclasses.replace(
            scenario, rf=dataclasses.replace(scenario.rf, n_bs=int(round(value))))
    raise ConfigError([f"unsupported sweep variable {variable}"])


def sweep_columns(spec: SweepSpec) -> list[str]:
    cols = [spec.variable.value]
    if "exact" in spec.outputs:
        cols += ["outage_af", "outage_df", "ber_af", "ber_df"]
    if "floors" in spec.outputs:
        cols += ["outage_af_floor_rf_snr", "outage_af_floor_led",
                 "outage_df_floor_rf_snr", "outage_df_floor_led",
                 "outage_floor_both",
                 "ber_af_floor_rf_snr", "ber_af_floor_led",
                 "ber_df_floor_rf_snr", "ber_df_floor_led",
                 "ber_floor_both"]
    if "mc" in spec.outputs:
        cols += ["mc_outage_af", "mc_outage_af_se", "mc_outage_df", "mc_outage_df_se",
                 "mc_ber_af", "mc_ber_af_se", "mc_ber_df", "mc_ber_df_se"]
    return cols


def _sweep_point(spec: SweepSpec, index: int, value: float) -> dict[str, float]:
    sc = _apply_variable(spec.scenario, spec.variable, value)
    der = sc.vlc_derived
    row: dict[str, float] = {spec.variable.value: value}
    af, df = RelayScheme.AF_FIXED_GAIN, RelayScheme.DF
    if "exact" in spec.outputs:
        row["outage_af"] = perf.outage_exact(af, sc.rf, sc.vlc, der, sc.gamma_th)
        row["outage_df"] = perf.outage_exact(df, sc.rf, sc.vlc, der, sc.gamma_th)
        row["ber_af"] = perf.ber_exact(af, sc.modulation, sc.rf, sc.vlc, der)
        row["ber_df"] = perf.ber_exact(df, sc.modulation, sc.rf, sc.vlc, der)
    if "floors" in spec.outputs:
        hi_rf, hi_led = AsymptoticRegime.HIGH_RF_SNR, AsymptoticRegime.HIGH_LED_POWER
        row["outage_af_floor_rf_snr"] = perf.outage_asymptote(af, hi_rf, sc.rf, sc.vlc, der, sc.gamma_th)
        row["outage_af_floor_led"] = perf.outage_asymptote(af, hi_led, sc.rf, sc.vlc, der, sc.gamma_th)
        row["outage_df_floor_rf_snr"] = perf.outage_asymptote(df, hi_rf, sc.rf, sc.vlc, der, sc.gamma_th)
        row["outage_df_floor_led"] = perf.outage_asymptote(df, hi_led, sc.rf, sc.vlc, der, sc.gamma_th)
        row["outage_floor_both"] = perf.outage_asymptote(af, AsymptoticRegime.BOTH, sc.rf, sc.vlc, der, sc.gamma_th)
        row["ber_af_floor_rf_snr"] = perf.ber_asymptote(af, hi_rf, sc.modulation, sc.rf, sc.vlc, der)
        row["ber_af_floor_led"] = perf.ber_asymptote(af, hi_led, sc.modulation, sc.rf, sc.vlc, der)
        row["ber_df_floor_rf_snr"] = perf.ber_asymptote(df, hi_rf, sc.modulation, sc.rf, sc.vlc, der)
        row["ber_df_floor_led"] = perf.ber_asymptote(df, hi_led, sc.modulation, sc.rf, sc.vlc, der)
        row["ber_floor_both"] = perf.ber_asymptote(af, AsymptoticRegime.BOTH, sc.modulation, sc.rf, sc.vlc, der)
    if "mc" in spec.outputs:
        sim = dataclasses.replace(sc.sim, seed=sc.sim.seed + index)
        est = mcsim.estimate_all(sc.rf, sc.vlc, der, sc.gamma_th, sc.modulation, sim)
        for key in ("outage_af", "outage_df", "ber_af", "ber_df"):
            row[f"mc_{key}"] = est[key].mean
            row[f"mc_{key}_se"] = est[key].std_err
    return row


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict[str, float]]:
    """Evaluate every grid point; rows come back in deterministic grid order
    regardless of execution parallelism."""
    values = sweep_values(spec)
    if jobs <= 1:
        return [_sweep_point(spec, i, v) for i, v in enumerate(values)]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_sweep_point, spec, i, v) for i, v in enumerate(values)]
        return [f.result() for f in futures]


def _fmt(value: float) -> str:
    return f"{value:.12e}"


def rows_to_csv(columns: list[str], rows: list[dict]) -> str:
    """Byte-stable CSV rendering (fixed scientific notation)."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell := row[c], str) else _fmt(cell) for c in columns))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation grid
# ---------------------------------------------------------------------------

# Twelve operating points spanning the regimes of the reference curves
# (LED-power sweeps, RF-SNR sweeps, geometry sweeps, both modulations).
_DEFAULT_GRID = [
    ("p01_single_bs",   {"n_bs": 1, "m": 1, "rho": 0.0, "mu_rf_db": 10.0, "n_leds": 2}),
    ("p02_two_bs",      {"n_bs": 2, "m": 1, "rho": 0.9, "mu_rf_db": 10.0, "n_leds": 2}),
    ("p03_fig4_mid",    {"n_bs": 3, "m": 2, "rho": 0.5, "mu_rf_db": 15.0, "n_leds": 2}),
    ("p04_fig4_corr",   {"n_bs": 3, "m": 2, "rho": 0.9, "mu_rf_db": 15.0, "n_leds": 2}),
    ("p05_dbpsk",       {"n_bs": 2, "m": 2, "rho": 0.8, "mu_rf_db": 10.0,
                         "modulation": "dbpsk", "gamma_th_db": 3.0}),
    ("p06_tilted_geom", {"n_bs": 2, "m": 3, "rho": 0.7, "mu_rf_db": 12.0, "n_leds": 3,
                         "phi_half_deg": 45.0, "height_m": 2.5}),
    ("p07_high_mu",     {"n_bs": 1, "m": 2, "rho": 0.5, "mu_rf_db": 20.0,
                         "height_m": 3.0, "modulation": "dbpsk"}),
    ("p08_full_corr",   {"n_bs": 3, "m": 1, "rho": 1.0, "mu_rf_db": 10.0, "n_leds": 2}),
    ("p09_uncorr",      {"n_bs": 2, "m": 2, "rho": 0.0, "mu_rf_db": 15.0, "n_leds": 3,
                         "phi_half_deg": 70.0}),
    ("p10_narrow_beam", {"n_bs": 3, "m": 2, "rho": 0.9, "mu_rf_db": 15.0, "n_leds": 3,
                         "phi_half_deg": 30.0}),
    ("p11_floor_zone",  {"n_bs": 2, "m": 2, "rho": 0.9, "mu_rf_db": 25.0, "n_leds": 4,
                         "height_m": 1.5, "gamma_th_db": 5.0}),
    ("p12_low_snr",     {"n_bs": 2, "m": 1, "rho": 0.5, "mu_rf_db": 5.0,
                         "modulation": "dbpsk"}),
]

VALIDATION_GRIDS = {
    "default": _DEFAULT_GRID,
    "smoke": _DEFAULT_GRID[:3],
}

_VALIDATE_COLUMNS = ["point", "metric", "analytic", "mc_mean", "mc_std_err", "z", "status"]


def _validate_point(name: str, overrides: dict, base: dict,
                    n_samples: int, seed: int, index: int) -> list[dict]:
    raw = validate_keys(merge_keys(base, overrides, name))
    sc = build_scenario(raw)
    der = sc.vlc_derived
    sim = SimConfig(n_samples=n_samples, seed=seed + index,
                    n_streams=sc.sim.n_streams, batch_size=sc.sim.batch_size)
    est = mcsim.estimate_all(sc.rf, sc.vlc, der, sc.gamma_th, sc.modulation, sim)
    analytic = {
        "outage_af": perf.outage_exact(RelayScheme.AF_FIXED_GAIN, sc.rf, sc.vlc, der, sc.gamma_th),
        "outage_df": perf.outage_exact(RelayScheme.DF, sc.rf, sc.vlc, der, sc.gamma_th),
        "ber_af": perf.ber_exact(RelayScheme.AF_FIXED_GAIN, sc.modulation, sc.rf, sc.vlc, der),
        "ber_df": perf.ber_exact(RelayScheme.DF, sc.modulation, sc.rf, sc.vlc, der),
    }
    rows = []
    for metric, value in analytic.items():
        e = est[metric]
        gap = abs(value - e.mean)
        z = gap / e.std_err if e.std_err > 0.0 else (0.0 if gap == 0.0 else math.inf)
        rows.append({
            "point": name, "metric": metric, "analytic": value,
            "mc_mean": e.mean, "mc_std_err": e.std_err,
            "z": z, "status": "ok" if z <= 3.0 else "FAIL",
        })
    return rows


def run_validation(grid: str = "default", n_samples: int = 10_000_000,
                   seed: int = 42, jobs: int = 1,
                   base: Optional[dict] = None) -> tuple[list[dict], bool]:
    """Run the analytic-vs-MC grid; returns (rows, all_ok)."""
    if grid not in VALIDATION_GRIDS:
        raise ConfigError([f"unknown grid '{grid}'; choose from "
                           f"{', '.join(sorted(VALIDATION_GRIDS))}"])
    points = VALIDATION_GRIDS[grid]
    base = dict(base) if base else default_keys()
    if jobs <= 1:
        nested = [_validate_point(n, o, base, n_samples, seed, i)
                  for i, (n, o) in enumerate(points)]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_validate_point, n, o, base, n_samples, seed, i)
                       for i, (n, o) in enumerate(points)]
            nested = [f.result() for f in futures]
    rows = [row for group in nested for row in group]
    return rows, all(r["status"] == "ok" for r in rows)


def _validation_csv(rows: list[dict]) -> str:
    lines = [",".join(_VALIDATE_COLUMNS)]
    for r in rows:
        lines.append(",".join([
            r["point"], r["metric"], _fmt(r["analytic"]), _fmt(r["mc_mean"]),
            _fmt(r["mc_std_err"]), f"{r['z']:.4f}", r["status"]]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing / entry point
# ---------------------------------------------------------------------------

def _parse_overrides(pairs: Optional[Sequence[str]]) -> dict:
    overrides = {}
    errors = []
    for pair in pairs or []:
        if "=" not in pair:
            errors.append(f"--set expects key=value, got '{pair}'")
            continue
        key, text = pair.split("=", 1)
        key = key.strip()
        text = text.strip()
        if key == "modulation":
            overrides[key] = text
            continue
        try:
            value = int(text)
        except ValueError:
            try:
                value = float(text)
            except ValueError:
                errors.append(f"--set {key}: cannot parse '{text}' as a number")
                continue
        overrides[key] = value
    if errors:
        raise ConfigError(errors)
    return overrides


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfvlc",
        description="Outage/BER analysis of dual-hop mixed RF-VLC relaying")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("--config", help="TOML configuration file")
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="figure preset supplying fixed parameters")
        p.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE",
                       help="override a single config key (repeatable)")
        p.add_argument("--K", type=int, dest="k_stations",
                       help="shorthand for --set n_bs=K")

    p_sweep = sub.add_parser("sweep", help="evaluate metrics across a parameter grid")
    add_config_args(p_sweep)
    p_sweep.add_argument("--var", required=True,
                         choices=[v.value for v in SweepVariable])
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--step", type=float, required=True)
    p_sweep.add_argument("--outputs", default="exact",
                         help="comma list from exact,floors,mc (default: exact)")
    p_sweep.add_argument("--samples", type=float, default=None,
                         help="MC samples per grid point (when mc requested)")
    p_sweep.add_argument("--seed", type=int, default=None, help="master MC seed")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_sweep.add_argument("--output", help="write CSV here instead of stdout")
    p_sweep.add_argument("--explain", action="store_true",
                         help="print derived constants to stderr before sweeping")

    p_val = sub.add_parser("validate", help="analytic vs Monte Carlo agreement grid")
    add_config_args(p_val)
    p_val.add_argument("--grid", default="default", choices=sorted(VALIDATION_GRIDS))
    p_val.add_argument("--samples", type=float, default=1e7)
    p_val.add_argument("--seed", type=int, default=42)
    p_val.add_argument("--jobs", type=int, default=1)
    p_val.add_argument("--output", help="write CSV here instead of stdout")

    p_exp = sub.add_parser("explain", help="print derived constants")
    add_config_args(p_exp)
    return parser


def _resolve_raw(args) -> dict:
    overrides = _parse_overrides(args.overrides)
    if args.k_stations is not None:
        overrides["n_bs"] = args.k_stations
    return load_config(path=args.config, preset=args.preset, overrides=overrides)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _explain_text(scenario: Scenario) -> str:
    return "".join(f"{name} = {_fmt(value)}\n"
                   for name, value in derived_constants(scenario).items())


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        raw = _resolve_raw(args)
        if args.command == "explain":
            sys.stdout.write(_explain_text(build_scenario(raw)))
            return 0
        if args.command == "sweep":
            if getattr(args, "samples", None) is not None:
                raw["n_samples"] = int(args.samples)
            if getattr(args, "seed", None) is not None:
                raw["seed"] = args.seed
            scenario = build_scenario(raw)
            outputs = frozenset(s.strip() for s in args.outputs.split(",") if s.strip())
            spec = SweepSpec(variable=SweepVariable(args.var), start=args.start,
                             stop=args.stop, step=args.step, scenario=scenario,
                             outputs=outputs)
            if args.explain:
                sys.stderr.write(_explain_text(scenario))
            rows = run_sweep(spec, jobs=args.jobs)
            _emit(rows_to_csv(sweep_columns(spec), rows), args.output)
            return 0
        # validate
        rows, ok = run_validation(grid=args.grid, n_samples=int(args.samples),
                                  seed=args.seed, jobs=args.jobs, base=raw)
        _emit(_validation_csv(rows), args.output)
        return 0 if ok else 1
    except ConfigError as exc:
        sys.stderr.write(json.dumps(
            {"error": "invalid configuration", "messages": exc.messages}) + "\n")
        return 2
    except (rf_link.CapacityError, perf.DomainError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "messages": [str(exc)]}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
