"""CSV serialisation of :class:`~pacedagg.sim.SimTrace`.

Two files per trace, one row per frame and one row per packet:

``rounds.csv``
    round, station, start, decision, frame_end, airtime, n_packets,
    queue_after, arrivals, blocked
``packets.csv``
    station, seq, round, arrival, departure

Times are seconds written with 17 significant digits, so a trace
round-trips exactly.  ``round`` is -1 and ``departure`` is ``nan`` for
packets still queued when the run stopped.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .sim import SimTrace

ROUND_COLUMNS = (
    "round", "station", "start", "decision", "frame_end", "airtime",
    "n_packets", "queue_after", "arrivals", "blocked",
)
PACKET_COLUMNS = ("station", "seq", "round", "arrival", "departure")
_F = "%.17g"


def _dump(columns, data, fmt) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    if len(data):
        np.savetxt(buf, data, fmt=fmt, delimiter=",")
    return buf.getvalue()


def rounds_csv(trace: SimTrace) -> str:
    r, n = trace.n_packets.shape
    f_idx, s_idx = np.meshgrid(np.arange(r), np.arange(n), indexing="ij")
    start = np.repeat(trace.round_start, n).reshape(r, n)
    cols = [f_idx, s_idx, start, trace.decision, trace.frame_end, trace.airtime,
            trace.n_packets, trace.queue_after, trace.arrivals, trace.blocked.astype(int)]
    data = np.column_stack([np.asarray(c, dtype=object).ravel() for c in cols])
    fmt = ["%d", "%d", _F, _F, _F, _F, "%d", "%d", "%d", "%d"]
    return _dump(ROUND_COLUMNS, data, fmt)


def packets_csv(trace: SimTrace) -> str:
    seq = np.zeros(len(trace.pkt_station), dtype=np.int64)
    for i in range(trace.n_stations):
        sel = trace.pkt_station == i
        seq[sel] = np.arange(sel.sum())
    data = np.column_stack([
        np.asarray(trace.pkt_station, dtype=object), np.asarray(seq, dtype=object),
        np.asarray(trace.pkt_round, dtype=object), trace.pkt_arrival.astype(object),
        trace.pkt_departure.astype(object),
    ])
    return _dump(PACKET_COLUMNS, data, ["%d", "%d", "%d", _F, _F])


def write_trace_csv(trace: SimTrace, directory) -> tuple:
    """Write ``rounds.csv`` and ``packets.csv`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = directory / "rounds.csv", directory / "packets.csv"
    paths[0].write_text(rounds_csv(trace))
    paths[1].write_text(packets_csv(trace))
    return paths


def read_trace_csv(directory, n_max: int) -> SimTrace:
    directory = Path(directory)
    rd = np.genfromtxt(directory / "rounds.csv", delimiter=",", skip_header=1, ndmin=2)
    pk = np.genfromtxt(directory / "packets.csv", delimiter=",", skip_header=1, ndmin=2)
    n = int(rd[:, 1].max()) + 1 if rd.size else 0
    r = len(rd) // n if n else 0

    def grid(col, dtype=float):
        return rd[:, col].reshape(r, n).astype(dtype)

    pk = pk.reshape(-1, len(PACKET_COLUMNS))
    return SimTrace(
        n_max=n_max,
        round_start=grid(2)[:, 0].copy(),
        decision=grid(3),
        frame_end=grid(4),
        airtime=grid(5),
        n_packets=grid(6, np.int64),
        queue_after=grid(7, np.int64),
        arrivals=grid(8, np.int64),
        blocked=grid(9, bool),
        pkt_station=pk[:, 0].astype(np.int64),
        pkt_round=pk[:, 2].astype(np.int64),
        pkt_arrival=pk[:, 3].copy(),
        pkt_departure=pk[:, 4].copy(),
    )
