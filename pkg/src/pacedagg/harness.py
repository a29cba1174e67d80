"""Side-by-side model/simulator sweeps.

A :class:`SweepSpec` varies one axis of a base :class:`SimConfig`.  For
each point the closed-form model is evaluated once and the simulator is
run once per replication seed; every (point, replication, station) becomes
one :class:`ComparisonRow`.
"""
from __future__ import annotations

import enum
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from typing import List, Optional, Tuple

import numpy as np

from . import model, sim
from .errors import AggError, ConfigError, UsageError
from .phy import DEFAULT_FRAME_OVERHEAD, ChannelParams, McsConfig, build_rate_vector

log = logging.getLogger(__name__)


class Axis(str, enum.Enum):
    SEND_RATE = "send_rate"  # Mbps per station, or a fraction of saturation
    MCS = "mcs"
    NSS = "nss"
    N_STATIONS = "n_stations"
    RATE_SPLIT = "rate_split"  # t in [0, 1] between split_start and split_end
    JITTER = "jitter"  # half-width in microseconds


@dataclass(frozen=True)
class Thresholds:
    agg_rel: float = 0.10
    agg_abs: float = 1.0  # packets; allowance at low aggregation
    std_rel: float = 0.20
    std_floor: float = 1.0  # std is only compared once the model predicts this much
    sat_std: float = 0.5
    delay_lower: float = 0.5
    checks: Tuple[str, ...] = ("agg", "std", "delay")  # which checks gate pass/fail

    def __post_init__(self):
        checks = tuple(self.checks.split(",")) if isinstance(self.checks, str) else tuple(self.checks)
        bad = set(checks) - {"agg", "std", "delay"}
        if bad:
            raise UsageError(f"unknown checks: {sorted(bad)}")
        object.__setattr__(self, "checks", checks)

    def override(self, **kw) -> "Thresholds":
        unknown = set(kw) - {f.name for f in fields(self)}
        if unknown:
            raise UsageError(f"unknown thresholds: {sorted(unknown)}")
        kw = {k: (v if k == "checks" else float(v)) for k, v in kw.items()}
        return replace(self, **kw)


@dataclass(frozen=True)
class SweepSpec:
    name: str
    axis: Axis
    points: Tuple[float, ...]
    base: sim.SimConfig
    replications: int = 5
    seeds: Optional[Tuple[int, ...]] = None
    point_unit: str = "mbps"  # send_rate only: "mbps" or "saturation"
    split_start: Optional[Tuple[float, ...]] = None  # Mbps per station
    split_end: Optional[Tuple[float, ...]] = None
    thresholds: Thresholds = Thresholds()

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise UsageError(f"sweep {self.name!r} has no points")
        if self.replications < 1:
            raise UsageError("replications must be >= 1")
        if self.seeds is not None:
            seeds = tuple(int(s) for s in self.seeds)
            if len(seeds) != self.replications:
                raise UsageError("need one seed per replication")
            object.__setattr__(self, "seeds", seeds)
        if self.point_unit not in ("mbps", "saturation"):
            raise UsageError(f"unknown point_unit {self.point_unit!r}")
        if self.axis is Axis.RATE_SPLIT:
            n = self.base.channel.n_stations
            if not (self.split_start and self.split_end) or not (
                len(self.split_start) == len(self.split_end) == n
            ):
                raise UsageError("rate_split needs split_start and split_end per station")

    @property
    def replication_seeds(self) -> Tuple[int, ...]:
        if self.seeds is not None:
            return self.seeds
        return tuple(self.base.seed + k for k in range(self.replications))

    def config_at(self, point: float) -> sim.SimConfig:
        """The base config with the sweep axis set to ``point``."""
        base = self.base
        ch = base.channel
        st = base.stations
        if self.axis is Axis.SEND_RATE:
            if self.point_unit == "saturation":
                # Saturation: the symmetric rate at which the load factor hits one.
                w = ch.frame_bits / np.array([s.mean_rate for s in st])
                x = point / w.sum()
            else:
                x = point * 1e6 / ch.packet_len
            st = tuple(replace(s, send_rate=x) for s in st)
        elif self.axis in (Axis.MCS, Axis.NSS):
            key = "mcs_index" if self.axis is Axis.MCS else "nss"
            if any(s.mcs is None for s in st):
                raise ConfigError(f"{self.axis.value} sweep needs MCS-configured stations")
            st = tuple(replace(s, mcs=replace(s.mcs, **{key: int(point)})) for s in st)
        elif self.axis is Axis.N_STATIONS:
            n = int(point)
            per = ch.c / ch.n_stations
            ch = replace(ch, n_stations=n, c=per * n)
            st = (st[0],) * n
        elif self.axis is Axis.RATE_SPLIT:
            rates = np.array(self.split_start) + point * (
                np.array(self.split_end) - np.array(self.split_start)
            )
            st = tuple(
                replace(s, send_rate=r * 1e6 / ch.packet_len) for s, r in zip(st, rates)
            )
        elif self.axis is Axis.JITTER:
            st = tuple(replace(s, jitter=point * 1e-6) for s in st)
        return replace(base, stations=st, channel=ch)


def config_hash(config: sim.SimConfig) -> str:
    """Short digest of everything in ``config`` except the seed."""
    d = asdict(replace(config, seed=0))
    blob = json.dumps(d, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def model_inputs(config: sim.SimConfig):
    """Channel parameters, airtime vector and load vector for the model."""
    ch = config.channel
    w = build_rate_vector(ch, [s.mean_rate for s in config.stations])
    x = model.LoadVector([s.send_rate for s in config.stations])
    return ch, w, x


@dataclass
class ComparisonRow:
    sweep: str
    axis: str
    point: float
    replication: int
    seed: int
    config_hash: str
    station: int
    send_rate: float = math.nan  # packets/s
    rho: float = math.nan
    regime: str = ""
    model_n_bar: float = math.nan
    model_fluct_std: float = math.nan
    model_delay_bound: float = math.nan
    sim_mean_agg: float = math.nan
    sim_std_agg: float = math.nan
    sim_mean_delay: float = math.nan
    sim_mean_airtime: float = math.nan
    sim_blocked: int = 0
    agg_rel_err: float = math.nan
    std_rel_err: float = math.nan
    delay_ratio: float = math.nan  # simulated delay / model bound
    agg_check: Optional[bool] = None
    std_check: Optional[bool] = None
    delay_check: Optional[bool] = None
    checks: str = ""  # checks that gated this row, e.g. "agg,std"
    note: str = ""

    @property
    def scenario(self) -> str:
        return f"{self.sweep}/{self.axis}={self.point:g}"

    @property
    def flagged(self) -> bool:
        return self.note.startswith("error")

    @property
    def passed(self) -> bool:
        return not any(c is False for c in (self.agg_check, self.std_check, self.delay_check))


def _rel(sim_value: float, model_value: float) -> float:
    if not math.isfinite(model_value) or model_value == 0:
        return math.nan
    return (sim_value - model_value) / model_value


def evaluate(row: ComparisonRow, th: Thresholds) -> ComparisonRow:
    """Copy of ``row`` with relative errors and pass/fail checks filled in."""
    if row.flagged:
        return row
    row = replace(row, checks=",".join(th.checks))
    row.agg_rel_err = _rel(row.sim_mean_agg, row.model_n_bar)
    row.std_rel_err = _rel(row.sim_std_agg, row.model_fluct_std)
    row.delay_ratio = _rel(row.sim_mean_delay, row.model_delay_bound) + 1.0
    row.agg_check = row.std_check = row.delay_check = None
    if "agg" in th.checks:
        tol = max(th.agg_rel * row.model_n_bar, th.agg_abs)
        row.agg_check = bool(abs(row.sim_mean_agg - row.model_n_bar) <= tol)
    if row.regime == model.Regime.SATURATED.value:
        if "std" in th.checks:
            row.std_check = bool(row.sim_std_agg < th.sat_std)
    elif row.regime == model.Regime.LINEAR.value:
        if "std" in th.checks and row.model_fluct_std >= th.std_floor:
            row.std_check = bool(abs(row.std_rel_err) <= th.std_rel)
        if "delay" in th.checks and row.sim_blocked == 0:
            bound = row.model_delay_bound
            row.delay_check = bool(
                th.delay_lower * bound <= row.sim_mean_delay <= bound + row.sim_mean_airtime
            )
    return row


def _simulate(config: sim.SimConfig) -> sim.SimStats:
    return sim.collect_stats(sim.run(config), config.warmup_fraction)


def _point_rows(spec: SweepSpec, point: float) -> List[ComparisonRow]:
    seeds = spec.replication_seeds
    try:
        cfg = spec.config_at(point)
        ch, w, x = model_inputs(cfg)
        m = model.mean_aggregation(ch, w, x)
    except AggError as exc:
        log.warning("%s point %g flagged: %s", spec.name, point, exc)
        return [
            ComparisonRow(spec.name, spec.axis.value, point, k, s, "", -1, note=f"error: {exc}")
            for k, s in enumerate(seeds)
        ]
    h = config_hash(cfg)
    rows = []
    for k, s in enumerate(seeds):
        st = _simulate(replace(cfg, seed=s))
        for i in range(ch.n_stations):
            row = ComparisonRow(
                sweep=spec.name, axis=spec.axis.value, point=float(point), replication=k,
                seed=s, config_hash=h, station=i, send_rate=float(x.x[i]), rho=m.rho,
                regime=m.regime[i].value, model_n_bar=float(m.n_bar[i]),
                model_fluct_std=float(m.fluct_std[i]), model_delay_bound=float(m.delay_bound[i]),
                sim_mean_agg=float(st.mean_agg[i]), sim_std_agg=float(st.std_agg[i]),
                sim_mean_delay=float(st.mean_delay[i]), sim_mean_airtime=float(st.mean_airtime[i]),
                sim_blocked=int(st.blocked_rounds[i]),
                note="below model envelope" if st.blocked_rounds[i] else "",
            )
            rows.append(evaluate(row, spec.thresholds))
    return rows


def run_sweep(spec: SweepSpec, jobs: int = 1) -> List[ComparisonRow]:
    """All comparison rows of ``spec`` in (point, replication, station) order."""
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            chunks = list(pool.map(_point_rows, [spec] * len(spec.points), spec.points))
    else:
        chunks = [_point_rows(spec, p) for p in spec.points]
    return [r for c in chunks for r in c]


def tau_grid(
    n_range=range(1, 21),
    nss_range=range(1, 4),
    mcs_range=range(0, 10),
    target_delay: float = 5e-3,
    frame_overhead: float = None,
    **channel_kw,
) -> np.ndarray:
    """Time constant over stations x NSS x MCS at a delay-target operating point.

    The round overhead is ``n * frame_overhead`` and the send rate comes from
    :func:`pacedagg.model.rate_for_delay_target`.  Returns an array shaped
    ``(len(n_range), len(nss_range), len(mcs_range))`` in seconds.
    """
    per = DEFAULT_FRAME_OVERHEAD if frame_overhead is None else frame_overhead
    out = np.empty((len(n_range), len(nss_range), len(mcs_range)))
    for a, n in enumerate(n_range):
        ch = ChannelParams(c=n * per, n_stations=n, **channel_kw)
        for b, nss in enumerate(nss_range):
            for k, mcs in enumerate(mcs_range):
                w = build_rate_vector(ch, [McsConfig(mcs, nss)] * n)
                x = model.rate_for_delay_target(ch, w, target_delay)
                out[a, b, k] = model.time_constant(ch, w, x)
    return out
