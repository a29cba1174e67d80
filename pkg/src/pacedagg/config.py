"""TOML sweep files.

One file describes one sweep.  Units are explicit in the key names::

    name = "fig1a-1sta"
    axis = "send_rate"          # send_rate | mcs | nss | n_stations | rate_split | jitter
    point_unit = "saturation"   # send_rate only: "mbps" (default) or "saturation"
    points = [0.05, 0.10]       # or: points = {start = 0.05, stop = 0.95, num = 19}
    replications = 5
    seeds = [1, 2, 3, 4, 5]     # optional, defaults to sim.seed + k

    [channel]
    c_us = 270                  # lumped per-round overhead
    n_stations = 1
    packet_bits = 12000
    mac_overhead_bits = 208
    n_max = 64
    cw_min = 16
    slot_us = 9

    [sim]
    rounds = 20000              # and/or duration_s
    warmup_fraction = 0.1
    seed = 1

    [[stations]]                # one table per station, or one reused for all
    send_rate_mbps = 100
    jitter_us = 6
    jitter_model = "renewal"    # or "grid"
    mcs = 9                     # with nss and gi ("long" | "short"); or rate_mbps;
    nss = 2                     # or rate_process_mbps = [...]

    [rate_split]                # rate_split axis only
    start_mbps = [5, 100]
    end_mbps = [310, 5]

    [thresholds]                # any Thresholds field
    agg_rel = 0.10
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, UsageError
from .harness import SweepSpec, Thresholds
from .phy import ChannelParams, McsConfig
from .sim import SimConfig, StationProfile

_CHANNEL_KEYS = {"c_us", "n_stations", "packet_bits", "mac_overhead_bits", "n_max", "cw_min", "slot_us"}
_STATION_KEYS = {
    "send_rate_mbps", "jitter_us", "jitter_model", "mcs", "nss", "gi", "rate_mbps", "rate_process_mbps",
}
_SIM_KEYS = {"rounds", "duration_s", "warmup_fraction", "seed"}
_TOP_KEYS = {
    "name", "axis", "point_unit", "points", "replications", "seeds",
    "channel", "sim", "stations", "rate_split", "thresholds",
}


def _check(table: dict, allowed: set, where: str):
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def _channel(d: dict) -> ChannelParams:
    _check(d, _CHANNEL_KEYS, "[channel]")
    n = int(d.get("n_stations", 1))
    kw = dict(n_stations=n)
    if "packet_bits" in d:
        kw["packet_len"] = int(d["packet_bits"])
    if "mac_overhead_bits" in d:
        kw["mac_overhead"] = int(d["mac_overhead_bits"])
    if "n_max" in d:
        kw["n_max"] = int(d["n_max"])
    if "cw_min" in d:
        kw["cw_min"] = int(d["cw_min"])
    if "slot_us" in d:
        kw["backoff_slot"] = float(d["slot_us"]) * 1e-6
    if "c_us" in d:
        return ChannelParams(c=float(d["c_us"]) * 1e-6, **kw)
    return ChannelParams.default(**kw)


def _station(d: dict, packet_bits: int) -> StationProfile:
    _check(d, _STATION_KEYS, "[[stations]]")
    if "send_rate_mbps" not in d:
        raise ConfigError("station needs send_rate_mbps")
    kw = dict(
        send_rate=float(d["send_rate_mbps"]) * 1e6 / packet_bits,
        jitter=float(d.get("jitter_us", 6.0)) * 1e-6,
        jitter_model=d.get("jitter_model", "renewal"),
    )
    if "mcs" in d:
        kw["mcs"] = McsConfig(int(d["mcs"]), int(d.get("nss", 1)), guard_interval=d.get("gi", "long"))
    if "rate_mbps" in d:
        kw["rate"] = float(d["rate_mbps"]) * 1e6
    if "rate_process_mbps" in d:
        kw["rate_process"] = tuple(float(r) * 1e6 for r in d["rate_process_mbps"])
    return StationProfile(**kw)


def _points(p) -> tuple:
    if isinstance(p, dict):
        try:
            return tuple(float(v) for v in np.linspace(p["start"], p["stop"], int(p["num"])))
        except KeyError as exc:
            raise ConfigError(f"points range needs start, stop, num (missing {exc})") from None
    return tuple(float(v) for v in p)


def sweep_from_dict(d: dict) -> SweepSpec:
    _check(d, _TOP_KEYS, "sweep file")
    try:
        channel = _channel(d.get("channel", {}))
        stations = d["stations"]
        if len(stations) == 1 and channel.n_stations > 1:
            stations = stations * channel.n_stations
        profiles = [_station(s, channel.packet_len) for s in stations]
        simd = d.get("sim", {})
        _check(simd, _SIM_KEYS, "[sim]")
        base = SimConfig(
            stations=profiles,
            channel=channel,
            rounds=simd.get("rounds", 20_000 if "duration_s" not in simd else None),
            duration=simd.get("duration_s"),
            warmup_fraction=float(simd.get("warmup_fraction", 0.1)),
            seed=int(simd.get("seed", 0)),
        )
        split = d.get("rate_split", {})
        return SweepSpec(
            name=d["name"],
            axis=d["axis"],
            points=_points(d["points"]),
            base=base,
            replications=int(d.get("replications", 5)),
            seeds=d.get("seeds"),
            point_unit=d.get("point_unit", "mbps"),
            split_start=tuple(split["start_mbps"]) if "start_mbps" in split else None,
            split_end=tuple(split["end_mbps"]) if "end_mbps" in split else None,
            thresholds=Thresholds().override(**d.get("thresholds", {})),
        )
    except KeyError as exc:
        raise ConfigError(f"missing required key {exc}") from None
    except ConfigError:
        raise
    except (UsageError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_sweep(path) -> SweepSpec:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    return sweep_from_dict(data)
