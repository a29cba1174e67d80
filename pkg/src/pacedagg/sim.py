"""Packet-level simulator of a paced downlink with round-robin aggregation.

Each station turn: draw a backoff, and at the end of it (the transmission
instant) take ``min(queue, n_max)`` packets into one frame.  The frame then
occupies ``fixed + backoff + (l + l_oh) * m / R`` seconds of airtime from
the start of the turn, and every packet in it departs at the frame end.
If the queue is empty at the transmission instant the turn waits for the
next arrival, so every frame carries at least one packet.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, UsageError
from .phy import ChannelParams, McsConfig, harmonic_mean_rate, phy_rate

log = logging.getLogger(__name__)

#: Fewer post-warmup rounds than this give noisy statistics.
MIN_STATS_ROUNDS = 10_000
JITTER_MODELS = ("renewal", "grid")


@dataclass(frozen=True)
class StationProfile:
    """One paced downlink flow.

    Give the PHY rate as ``mcs``, as a fixed ``rate`` in bits/s, or as a
    per-round ``rate_process`` that is cycled through.
    """

    send_rate: float  # packets/s
    jitter: float = 6e-6  # half-width of the uniform jitter, s
    mcs: Optional[McsConfig] = None
    rate: Optional[float] = None
    rate_process: Optional[Tuple[float, ...]] = None
    jitter_model: str = "renewal"  # or "grid": k/x + U(-J, J), no accumulation

    def __post_init__(self):
        if not self.send_rate > 0:
            raise ConfigError(f"send_rate must be positive, got {self.send_rate}")
        if self.jitter < 0:
            raise ConfigError("jitter must be non-negative")
        if self.jitter_model not in JITTER_MODELS:
            raise ConfigError(f"jitter_model must be one of {JITTER_MODELS}")
        limit = 1.0 / self.send_rate / (2.0 if self.jitter_model == "grid" else 1.0)
        if self.jitter >= limit:
            raise ConfigError(
                f"jitter {self.jitter:.3g}s must be below {limit:.3g}s for {self.jitter_model} pacing"
            )
        given = sum(v is not None for v in (self.mcs, self.rate, self.rate_process))
        if given != 1:
            raise ConfigError("give exactly one of mcs, rate, rate_process")
        if self.rate_process is not None:
            rp = tuple(float(r) for r in self.rate_process)
            if not rp or min(rp) <= 0:
                raise ConfigError("rate_process must be non-empty and positive")
            object.__setattr__(self, "rate_process", rp)
        if self.rate is not None and not self.rate > 0:
            raise ConfigError("rate must be positive")

    def round_rates(self) -> np.ndarray:
        if self.rate_process is not None:
            return np.array(self.rate_process)
        if self.mcs is not None:
            return np.array([phy_rate(self.mcs)])
        return np.array([float(self.rate)])

    @property
    def mean_rate(self) -> float:
        """Harmonic-mean PHY rate, the one that sets mean airtime."""
        return harmonic_mean_rate(self.round_rates())


@dataclass(frozen=True)
class FrameOverhead:
    """Per-frame overhead: a fixed part plus ``U{0..cw_min-1}`` backoff slots."""

    fixed: float
    cw_min: int = 16
    slot: float = 9e-6

    def __post_init__(self):
        if self.fixed < 0 or self.cw_min < 1 or self.slot < 0:
            raise ConfigError(f"invalid frame overhead {self}")

    @property
    def mean(self) -> float:
        return self.fixed + 0.5 * (self.cw_min - 1) * self.slot

    @classmethod
    def from_channel(cls, channel: ChannelParams) -> "FrameOverhead":
        """Split ``c`` evenly over the stations' frames, backoff mean included."""
        fixed = channel.c / channel.n_stations - 0.5 * (channel.cw_min - 1) * channel.backoff_slot
        if fixed < 0:
            raise ConfigError(
                f"c={channel.c:.4g}s is below the mean backoff of {channel.n_stations} frames"
            )
        return cls(fixed=fixed, cw_min=channel.cw_min, slot=channel.backoff_slot)


@dataclass(frozen=True)
class SimConfig:
    stations: Tuple[StationProfile, ...]
    channel: ChannelParams
    overhead: Optional[FrameOverhead] = None  # derived from channel.c when None
    rounds: Optional[int] = 20_000
    duration: Optional[float] = None  # seconds; whichever limit is hit first
    warmup_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "stations", tuple(self.stations))
        if len(self.stations) != self.channel.n_stations:
            raise ConfigError(
                f"{len(self.stations)} stations but channel.n_stations={self.channel.n_stations}"
            )
        if self.rounds is None and self.duration is None:
            raise ConfigError("give rounds or duration")
        if self.rounds is not None and self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if self.duration is not None and not self.duration > 0:
            raise ConfigError("duration must be positive")
        if not 0 <= self.warmup_fraction < 1:
            raise ConfigError("warmup_fraction must be in [0, 1)")
        if self.overhead is None:
            object.__setattr__(self, "overhead", FrameOverhead.from_channel(self.channel))


class RoundRecord(NamedTuple):
    start: float
    frame_airtime: np.ndarray
    n_packets: np.ndarray
    queue_after: np.ndarray


@dataclass
class SimTrace:
    """Columnar record of a run.  Per-frame arrays have shape ``(rounds, n)``.

    ``arrivals[f, i]`` counts packets that reached station ``i``'s queue
    between its transmission instants in rounds ``f - 1`` and ``f``;
    ``queue_after`` is the backlog left once frame ``f`` is built.
    """

    n_max: int
    round_start: np.ndarray
    decision: np.ndarray
    frame_end: np.ndarray
    airtime: np.ndarray
    n_packets: np.ndarray
    queue_after: np.ndarray
    arrivals: np.ndarray
    blocked: np.ndarray
    pkt_station: np.ndarray
    pkt_round: np.ndarray  # -1 while still queued at the end of the run
    pkt_arrival: np.ndarray
    pkt_departure: np.ndarray  # nan while still queued

    @property
    def n_rounds(self) -> int:
        return len(self.round_start)

    @property
    def n_stations(self) -> int:
        return self.n_packets.shape[1]

    @property
    def end_time(self) -> float:
        return float(self.frame_end[-1, -1]) if self.n_rounds else 0.0

    def round(self, f: int) -> RoundRecord:
        return RoundRecord(
            float(self.round_start[f]), self.airtime[f], self.n_packets[f], self.queue_after[f]
        )

    @property
    def rounds(self):
        return [self.round(f) for f in range(self.n_rounds)]


@dataclass
class SimStats:
    mean_agg: np.ndarray
    std_agg: np.ndarray
    mean_delay: np.ndarray
    p95_delay: np.ndarray
    throughput: np.ndarray  # packets/s
    mean_airtime: np.ndarray  # mean frame airtime per station, s
    blocked_rounds: np.ndarray  # turns that waited on an empty queue
    mean_round: float
    rounds_used: int


class ArrivalStream:
    """Lazily extended paced arrivals.

    ``renewal``: ``t_k = t_{k-1} + 1/x + U(-J, J)``, i.i.d. gaps.
    ``grid``: ``t_k = k/x + U(-J, J)`` with ``J < 1/(2x)``, so order is kept.
    """

    def __init__(
        self, send_rate: float, jitter: float, rng: np.random.Generator, model: str = "renewal"
    ):
        limit = 1.0 / send_rate / (2.0 if model == "grid" else 1.0)
        if jitter >= limit:
            raise ConfigError("jitter too large for the inter-arrival time")
        self.delta = 1.0 / send_rate
        self.jitter = jitter
        self.rng = rng
        self.grid = model == "grid"
        self.times = np.empty(0)
        self._drift = 0.0  # running sum of renewal jitter

    def _grow(self):
        k0 = len(self.times)
        n = max(4096, k0)
        k = np.arange(k0 + 1, k0 + n + 1, dtype=float)
        if self.jitter == 0:
            offset = 0.0
        elif self.grid:
            offset = self.rng.uniform(-self.jitter, self.jitter, n)
        else:
            offset = self._drift + np.cumsum(self.rng.uniform(-self.jitter, self.jitter, n))
            self._drift = float(offset[-1])
        self.times = np.concatenate((self.times, k * self.delta + offset))

    def extend_past(self, t: float) -> np.ndarray:
        while not len(self.times) or self.times[-1] <= t:
            self._grow()
        return self.times


def generate_arrivals(profile: StationProfile, horizon: float, seed=None) -> np.ndarray:
    """Arrival times in ``(0, horizon]`` for one paced flow."""
    if not horizon > 0:
        raise UsageError("horizon must be positive")
    stream = ArrivalStream(
        profile.send_rate, profile.jitter, np.random.default_rng(seed), profile.jitter_model
    )
    times = stream.extend_past(horizon)
    return times[times <= horizon].copy()


def run(config: SimConfig) -> SimTrace:
    """Simulate round-robin service until the round or time limit."""
    n = len(config.stations)
    n_max = config.channel.n_max
    bits = float(config.channel.frame_bits)
    oh = config.overhead
    children = np.random.SeedSequence(config.seed).spawn(n + 1)
    backoff_rng = np.random.default_rng(children[0])
    streams = [
        ArrivalStream(s.send_rate, s.jitter, np.random.default_rng(children[i + 1]), s.jitter_model)
        for i, s in enumerate(config.stations)
    ]
    rates = [s.round_rates().tolist() for s in config.stations]
    max_rounds = config.rounds if config.rounds is not None else np.iinfo(np.int64).max
    horizon = config.duration if config.duration is not None else np.inf

    cols = {k: [] for k in ("start", "decision", "end", "air", "m", "q", "p", "blocked")}
    head = [0] * n  # next packet to send
    seen = [0] * n  # packets counted as arrived
    t = 0.0
    f = 0
    block = 1024
    slots = np.empty((0, n), dtype=np.int64)
    while f < max_rounds and t < horizon:
        if f % block == 0:
            slots = backoff_rng.integers(0, oh.cw_min, size=(block, n)) * oh.slot
        row = slots[f % block]
        cols["start"].append(t)
        for i in range(n):
            backoff = float(row[i])
            td = t + backoff
            arr = streams[i].extend_past(td)
            avail = int(np.searchsorted(arr, td, side="right"))
            blocked = avail == head[i]
            if blocked:
                td = float(arr[head[i]])
                avail = int(np.searchsorted(arr, td, side="right"))
            m = min(avail - head[i], n_max)
            rr = rates[i]
            payload = bits * m / rr[f % len(rr)]
            end = td + oh.fixed + payload
            cols["decision"].append(td)
            cols["end"].append(end)
            cols["air"].append(oh.fixed + backoff + payload)
            cols["m"].append(m)
            cols["q"].append(avail - head[i] - m)
            cols["p"].append(avail - seen[i])
            cols["blocked"].append(blocked)
            head[i] += m
            seen[i] = avail
            t = end
        f += 1

    shape = (f, n)
    n_packets = np.array(cols["m"], dtype=np.int64).reshape(shape)
    frame_end = np.array(cols["end"]).reshape(shape)
    t_end = t
    st, rd, ar, dp = [], [], [], []
    for i in range(n):
        times = streams[i].times
        times = times[times <= t_end]
        sent = head[i]
        dep = np.full(len(times), np.nan)
        rnd = np.full(len(times), -1, dtype=np.int64)
        dep[:sent] = np.repeat(frame_end[:, i], n_packets[:, i])
        rnd[:sent] = np.repeat(np.arange(f), n_packets[:, i])
        st.append(np.full(len(times), i, dtype=np.int64))
        rd.append(rnd)
        ar.append(times)
        dp.append(dep)
    if any(cols["blocked"]):
        log.debug("%d turns waited on an empty queue", sum(cols["blocked"]))
    return SimTrace(
        n_max=n_max,
        round_start=np.array(cols["start"]),
        decision=np.array(cols["decision"]).reshape(shape),
        frame_end=frame_end,
        airtime=np.array(cols["air"]).reshape(shape),
        n_packets=n_packets,
        queue_after=np.array(cols["q"], dtype=np.int64).reshape(shape),
        arrivals=np.array(cols["p"], dtype=np.int64).reshape(shape),
        blocked=np.array(cols["blocked"], dtype=bool).reshape(shape),
        pkt_station=np.concatenate(st),
        pkt_round=np.concatenate(rd),
        pkt_arrival=np.concatenate(ar),
        pkt_departure=np.concatenate(dp),
    )


def verify_queue_recursion(trace: SimTrace) -> bool:
    """Replay ``q[f+1] = max(q[f] + P[f] - n_max, 0)`` against the trace."""
    q_prev = np.zeros(trace.n_stations, dtype=np.int64)
    for f in range(trace.n_rounds):
        expect = np.maximum(q_prev + trace.arrivals[f] - trace.n_max, 0)
        if not np.array_equal(expect, trace.queue_after[f]):
            return False
        q_prev = trace.queue_after[f]
    return True


def collect_stats(trace: SimTrace, warmup_fraction: float = 0.1) -> SimStats:
    """Per-station statistics over the rounds after the warmup."""
    if not 0 <= warmup_fraction < 1:
        raise UsageError("warmup_fraction must be in [0, 1)")
    if trace.n_rounds == 0:
        raise UsageError("empty trace")
    skip = math.ceil(trace.n_rounds * warmup_fraction - 1e-9)
    used = trace.n_rounds - skip
    if used < 1:
        raise UsageError("every round falls inside the warmup")
    if used < MIN_STATS_ROUNDS:
        log.info("statistics over only %d rounds", used)
    n = trace.n_stations
    agg = trace.n_packets[skip:]
    t0 = float(trace.round_start[skip])
    elapsed = trace.end_time - t0
    sent = trace.pkt_round >= skip
    mean_delay = np.empty(n)
    p95 = np.empty(n)
    count = np.empty(n)
    for i in range(n):
        sel = sent & (trace.pkt_station == i)
        d = trace.pkt_departure[sel] - trace.pkt_arrival[sel]
        count[i] = d.size
        mean_delay[i] = d.mean() if d.size else np.nan
        p95[i] = np.percentile(d, 95) if d.size else np.nan
    return SimStats(
        mean_agg=agg.mean(axis=0),
        std_agg=agg.std(axis=0),
        mean_delay=mean_delay,
        p95_delay=p95,
        throughput=count / elapsed if elapsed > 0 else np.full(n, np.nan),
        mean_airtime=trace.airtime[skip:].mean(axis=0),
        blocked_rounds=trace.blocked[skip:].sum(axis=0),
        mean_round=elapsed / used,
        rounds_used=used,
    )
