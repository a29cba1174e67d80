"""Desk-scale replicas of the validation experiments.

Each builder returns a :class:`~pacedagg.harness.SweepSpec` (or a list of
them) with 2e4 rounds per replication by default.
"""
from __future__ import annotations

from typing import List, Sequence

import numpy as np

from .harness import Axis, SweepSpec, Thresholds
from .phy import ChannelParams, McsConfig
from .sim import SimConfig, StationProfile

ROUNDS = 20_000
REPLICATIONS = 5


def _base(stations, channel, rounds, seed) -> SimConfig:
    return SimConfig(stations=tuple(stations), channel=channel, rounds=rounds, seed=seed)


def fig1a(
    n_stations: int = 1,
    fractions: Sequence[float] = tuple(np.round(np.linspace(0.05, 0.95, 19), 2)),
    rounds: int = ROUNDS,
    replications: int = REPLICATIONS,
    seed: int = 1,
) -> SweepSpec:
    """Same send rate to every station, MCS 9 / NSS 2, swept as a fraction of saturation."""
    ch = ChannelParams.default(n_stations)
    st = [StationProfile(1.0, mcs=McsConfig(9, 2))] * n_stations
    return SweepSpec(
        name=f"fig1a-{n_stations}sta",
        axis=Axis.SEND_RATE,
        points=tuple(fractions),
        point_unit="saturation",
        base=_base(st, ch, rounds, seed),
        replications=replications,
        thresholds=Thresholds(checks=("agg",)),
    )


def fig1c(
    send_rates_mbps: Sequence[float] = (150.0, 300.0, 450.0),
    rounds: int = ROUNDS,
    replications: int = REPLICATIONS,
    seed: int = 1,
) -> List[SweepSpec]:
    """One station at NSS 3, MCS 0..9, one sweep per send rate."""
    ch = ChannelParams.default(1)
    out = []
    for rate in send_rates_mbps:
        st = [StationProfile(rate * 1e6 / ch.packet_len, mcs=McsConfig(0, 3))]
        out.append(SweepSpec(
            name=f"fig1c-{rate:g}mbps",
            axis=Axis.MCS,
            points=tuple(range(10)),
            base=_base(st, ch, rounds, seed),
            replications=replications,
            thresholds=Thresholds(agg_abs=0.0, checks=("agg",)),
        ))
    return out


def fig1d(
    num: int = 11,
    rounds: int = ROUNDS,
    replications: int = REPLICATIONS,
    seed: int = 1,
) -> SweepSpec:
    """Two stations, MCS 9 and MCS 3 at NSS 1; station 1 ramps 5->310 Mbps, station 2 100->5."""
    ch = ChannelParams.default(2)
    st = [StationProfile(1.0, mcs=McsConfig(9, 1)), StationProfile(1.0, mcs=McsConfig(3, 1))]
    return SweepSpec(
        name="fig1d",
        axis=Axis.RATE_SPLIT,
        points=tuple(np.round(np.linspace(0.0, 1.0, num), 4)),
        base=_base(st, ch, rounds, seed),
        replications=replications,
        split_start=(5.0, 100.0),
        split_end=(310.0, 5.0),
        thresholds=Thresholds(checks=("agg",)),
    )


def fig2a(
    mcs_values: Sequence[int] = (5, 7, 9),
    loads: Sequence[float] = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    jitter: float = 6e-6,
    rounds: int = ROUNDS,
    replications: int = REPLICATIONS,
    seed: int = 1,
) -> List[SweepSpec]:
    """Aggregation std for one station at NSS 3; points are load factors."""
    ch = ChannelParams.default(1)
    out = []
    for mcs in mcs_values:
        st = [StationProfile(1.0, jitter=jitter, mcs=McsConfig(mcs, 3))]
        out.append(SweepSpec(
            name=f"fig2a-mcs{mcs}",
            axis=Axis.SEND_RATE,
            points=tuple(loads),
            point_unit="saturation",
            base=_base(st, ch, rounds, seed),
            replications=replications,
            thresholds=Thresholds(checks=("agg", "std")),
        ))
    return out


def jitter_sweep(
    mcs: int,
    load: float,
    jitters_us: Sequence[float] = (0.0, 6.0, 24.0),
    rounds: int = ROUNDS,
    replications: int = REPLICATIONS,
    seed: int = 1,
    jitter_model: str = "renewal",
) -> SweepSpec:
    """Pacing jitter varied at one fig2a operating point."""
    ch = ChannelParams.default(1)
    st = StationProfile(1.0, jitter=0.0, mcs=McsConfig(mcs, 3), jitter_model=jitter_model)
    x = load / (ch.frame_bits / st.mean_rate)
    st = StationProfile(x, jitter=0.0, mcs=McsConfig(mcs, 3), jitter_model=jitter_model)
    return SweepSpec(
        name=f"jitter-mcs{mcs}-load{load:g}-{jitter_model}",
        axis=Axis.JITTER,
        points=tuple(jitters_us),
        base=_base([st], ch, rounds, seed),
        replications=replications,
        thresholds=Thresholds(checks=("std",)),
    )


def fig2d(
    loads: Sequence[float] = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7),
    rounds: int = ROUNDS,
    replications: int = REPLICATIONS,
    seed: int = 1,
) -> SweepSpec:
    """Packet delay against its bound, one station at MCS 9 / NSS 1."""
    ch = ChannelParams.default(1)
    st = [StationProfile(1.0, mcs=McsConfig(9, 1))]
    return SweepSpec(
        name="fig2d",
        axis=Axis.SEND_RATE,
        points=tuple(loads),
        point_unit="saturation",
        base=_base(st, ch, rounds, seed),
        replications=replications,
        thresholds=Thresholds(checks=("agg", "delay")),
    )


def all_sweeps(rounds: int = ROUNDS, replications: int = REPLICATIONS) -> List[SweepSpec]:
    kw = dict(rounds=rounds, replications=replications)
    return [fig1a(1, **kw), fig1a(2, **kw), *fig1c(**kw), fig1d(**kw), *fig2a(**kw), fig2d(**kw)]
