"""Performance-analysis engine for dual-hop mixed RF-VLC relaying systems.

Exact and asymptotic closed-form outage probability and average BER for
fixed-gain AF and DF relays with outdated-CSI base-station selection,
cross-validated by an integrated Monte Carlo link simulator and driven by
a sweep-oriented CLI (see rfvlc.cli / the `rfvlc` console script).
"""

from . import cli, mcsim, perf, rf_link, specfun, vlc_link
from .mcsim import Estimate, SimConfig
from .perf import (
    AsymptoticRegime,
    BPSK,
    DBPSK,
    Modulation,
    PerfPoint,
    RelayScheme,
    ber_asymptote,
    ber_exact,
    evaluate_point,
    outage_asymptote,
    outage_exact,
)
from .rf_link import RfConfig
from .vlc_link import VlcConfig, VlcDerived, derive

__version__ = "0.1.0"

__all__ = [
    "specfun", "rf_link", "vlc_link", "perf", "mcsim", "cli",
    "RfConfig", "VlcConfig", "VlcDerived", "derive",
    "RelayScheme", "AsymptoticRegime", "Modulation", "BPSK", "DBPSK",
    "PerfPoint", "SimConfig", "Estimate",
    "outage_exact", "outage_asymptote", "ber_exact", "ber_asymptote",
    "evaluate_point",
]
