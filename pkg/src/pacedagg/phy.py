"""802.11ac (VHT, 80 MHz) PHY rates and the scalar channel parameters of the model.

The per-round overhead ``c`` is a lumped input, not derived from preamble or
ACK timings.  ``w_i = (l + l_oh) / R_i`` is the airtime of one packet to
station ``i``.
"""
from __future__ import annotations

import csv
import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, DomainError, UsageError

#: Lumped per-round overhead fitted for one and two stations.
DEFAULT_OVERHEAD = {1: 270e-6, 2: 320e-6}
#: Typical mean airtime overhead of a single frame exchange, for n-station scaling.
DEFAULT_FRAME_OVERHEAD = 200e-6
DEFAULT_PACKET_BITS = 12000
DEFAULT_MAC_OVERHEAD_BITS = 208
DEFAULT_N_MAX = 64
SLOT_TIME = 9e-6
CW_MIN = 16

# 80 MHz VHT: 234 data subcarriers.
_DATA_SUBCARRIERS = {80: 234}
_MODULATION = {
    0: ("BPSK", 1, Fraction(1, 2)),
    1: ("QPSK", 2, Fraction(1, 2)),
    2: ("QPSK", 2, Fraction(3, 4)),
    3: ("16-QAM", 4, Fraction(1, 2)),
    4: ("16-QAM", 4, Fraction(3, 4)),
    5: ("64-QAM", 6, Fraction(2, 3)),
    6: ("64-QAM", 6, Fraction(3, 4)),
    7: ("64-QAM", 6, Fraction(5, 6)),
    8: ("256-QAM", 8, Fraction(3, 4)),
    9: ("256-QAM", 8, Fraction(5, 6)),
}


class GuardInterval(str, enum.Enum):
    LONG = "long"  # 800 ns, 4.0 us symbol
    SHORT = "short"  # 400 ns, 3.6 us symbol

    @property
    def symbol_time(self) -> Fraction:
        return Fraction(4, 10**6) if self is GuardInterval.LONG else Fraction(36, 10**7)


@dataclass(frozen=True)
class McsConfig:
    mcs_index: int
    nss: int = 1
    channel_width: int = 80
    guard_interval: GuardInterval = GuardInterval.LONG

    def __post_init__(self):
        if self.channel_width not in _DATA_SUBCARRIERS:
            raise ConfigError(f"unsupported channel width {self.channel_width} MHz (only 80)")
        if not 0 <= self.mcs_index <= 9:
            raise ConfigError(f"mcs_index must be in [0, 9], got {self.mcs_index}")
        if not 1 <= self.nss <= 3:
            raise ConfigError(f"nss must be in [1, 3], got {self.nss}")
        object.__setattr__(self, "guard_interval", GuardInterval(self.guard_interval))


@dataclass(frozen=True)
class ChannelParams:
    """Per-WLAN constants shared by the model and the simulator.

    ``c`` is the mean aggregate overhead of one round (all ``n_stations``
    frames), in seconds.  Lengths are in bits.
    """

    c: float
    n_stations: int = 1
    packet_len: int = DEFAULT_PACKET_BITS
    mac_overhead: int = DEFAULT_MAC_OVERHEAD_BITS
    n_max: int = DEFAULT_N_MAX
    backoff_slot: float = SLOT_TIME
    cw_min: int = CW_MIN

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigError(f"overhead c must be positive, got {self.c}")
        if self.n_stations < 1:
            raise ConfigError("n_stations must be >= 1")
        if not self.packet_len > 0 or self.mac_overhead < 0:
            raise ConfigError("need packet_len > 0 and mac_overhead >= 0")
        if self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        if self.cw_min < 1 or self.backoff_slot < 0:
            raise ConfigError("need cw_min >= 1 and backoff_slot >= 0")

    @classmethod
    def default(cls, n_stations: int = 1, **kw) -> "ChannelParams":
        """Fitted overhead for one or two stations, ``n * DEFAULT_FRAME_OVERHEAD`` beyond."""
        c = DEFAULT_OVERHEAD.get(n_stations, n_stations * DEFAULT_FRAME_OVERHEAD)
        return cls(c=c, n_stations=n_stations, **kw)

    @property
    def frame_bits(self) -> int:
        return self.packet_len + self.mac_overhead

    @property
    def backoff_width(self) -> float:
        """Support width of one frame's backoff, ``(cw_min - 1)`` slots."""
        return (self.cw_min - 1) * self.backoff_slot

    @property
    def overhead_std(self) -> float:
        """Std of the round overhead C_f: n independent uniform backoffs."""
        return np.sqrt(self.n_stations) * self.backoff_width / np.sqrt(12.0)


@dataclass(frozen=True)
class RateVector:
    w: np.ndarray  # seconds per packet
    r_bar: np.ndarray = field(repr=False)  # bits per second

    def __len__(self):
        return len(self.w)


def vht_rate(cfg: McsConfig) -> Fraction:
    """Exact VHT data rate from the OFDM parameters, in bits/s."""
    _, bits, coding = _MODULATION[cfg.mcs_index]
    n_dbps = _DATA_SUBCARRIERS[cfg.channel_width] * bits * coding * cfg.nss
    return n_dbps / cfg.guard_interval.symbol_time


@functools.lru_cache(maxsize=None)
def rate_table() -> dict:
    """The packaged rate table keyed by ``(mcs, nss, guard_interval)``."""
    src = resources.files("pacedagg").joinpath("data/vht80_rates.csv")
    with src.open("r", newline="") as fh:
        return {
            (int(r["mcs"]), int(r["nss"]), GuardInterval(r["guard_interval"])): float(r["rate_bps"])
            for r in csv.DictReader(fh)
        }


def phy_rate(cfg: McsConfig) -> float:
    """VHT PHY data rate in bits/s, looked up in the 80 MHz table."""
    try:
        return rate_table()[(cfg.mcs_index, cfg.nss, cfg.guard_interval)]
    except KeyError:
        raise ConfigError(f"no table entry for {cfg}") from None


def harmonic_mean_rate(rate_samples: Sequence[float]) -> float:
    """``1 / mean(1/R)``: the rate giving the right mean airtime."""
    r = np.asarray(rate_samples, dtype=float)
    if r.size == 0:
        raise DomainError("need at least one rate sample")
    if np.any(~(r > 0)):
        raise DomainError("rate samples must be positive")
    return float(1.0 / np.mean(1.0 / r))


def build_rate_vector(
    params: ChannelParams, station_cfgs: Sequence[Union[McsConfig, float]]
) -> RateVector:
    """Per-station packet airtimes from MCS configs or explicit mean rates (bits/s)."""
    if len(station_cfgs) != params.n_stations:
        raise UsageError(
            f"expected {params.n_stations} station configs, got {len(station_cfgs)}"
        )
    r_bar = np.array(
        [phy_rate(s) if isinstance(s, McsConfig) else float(s) for s in station_cfgs]
    )
    if np.any(~(r_bar > 0)):
        raise DomainError("station rates must be positive")
    return RateVector(w=params.frame_bits / r_bar, r_bar=r_bar)
