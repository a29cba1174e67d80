"""Closed-form aggregation model for a paced, round-robin served downlink.

With load factor ``rho = w @ x`` below one, the mean number of packets per
frame is ``c * x / (1 - rho)`` projected onto ``[1, n_max]``.  The same
round-length argument gives the fluctuation dynamics

    eta[f+1] = x * (w @ eta[f]) + (C[f] - c) * x

which is rank one, so everything reduces to a scalar AR(1) with
coefficient ``rho``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError, InfeasibleError, UnstableError, UsageError
from .phy import ChannelParams, RateVector

#: Sigma multiple of the fluctuation std used to flag the transition band.
TRANSITION_SIGMAS = 2.0


class Regime(str, enum.Enum):
    SATURATED = "saturated"
    LINEAR = "linear"
    TRANSITION = "transition"


@dataclass(frozen=True)
class LoadVector:
    x: np.ndarray  # packets/s

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if np.any(~(x > 0)):
            raise DomainError("send rates must be positive")
        object.__setattr__(self, "x", x)

    @classmethod
    def from_delta(cls, delta) -> "LoadVector":
        return cls(1.0 / np.asarray(delta, dtype=float))

    @classmethod
    def from_mbps(cls, rates_mbps, packet_len: int) -> "LoadVector":
        return cls(np.asarray(rates_mbps, dtype=float) * 1e6 / packet_len)

    @property
    def delta(self) -> np.ndarray:
        return 1.0 / self.x

    def __len__(self):
        return len(self.x)


@dataclass(frozen=True)
class ModelResult:
    n_bar: np.ndarray
    n_bar_unclamped: np.ndarray
    rho: float
    regime: Tuple[Regime, ...]
    mean_round: float
    delay_bound: np.ndarray
    fluct_std: np.ndarray
    tau: float


Vec = Union[RateVector, LoadVector, np.ndarray, list, tuple]


def _vectors(params: ChannelParams, w: Vec, x: Vec) -> Tuple[np.ndarray, np.ndarray]:
    w = np.atleast_1d(np.asarray(w.w if isinstance(w, RateVector) else w, dtype=float))
    if isinstance(x, LoadVector):
        x = x.x
    else:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(~(x > 0)):
            raise DomainError("send rates must be positive")
    if not (len(w) == len(x) == params.n_stations):
        raise UsageError(
            f"dimension mismatch: n_stations={params.n_stations}, len(w)={len(w)}, len(x)={len(x)}"
        )
    return w, x


def load_factor(w: Vec, x: Vec) -> float:
    """``rho = w @ x``, the fraction of airtime spent on payload."""
    w = w.w if isinstance(w, RateVector) else w
    x = x.x if isinstance(x, LoadVector) else x
    return float(np.dot(w, x))


def project(n, n_max: int) -> np.ndarray:
    """Projection onto ``[1, n_max]``."""
    return np.clip(n, 1.0, n_max)


def unclamped_aggregation(params: ChannelParams, w: Vec, x: Vec) -> np.ndarray:
    """``F(x) = c x / (1 - rho)``; ``inf`` once the load factor reaches one."""
    w, x = _vectors(params, w, x)
    rho = float(w @ x)
    if rho >= 1.0:
        return np.full_like(x, np.inf)
    return params.c * x / (1.0 - rho)


def _round_fixed_point(c: float, w: np.ndarray, x: np.ndarray, n_max: int) -> float:
    # Solves omega = c + sum_i w_i * clip(omega * x_i, 1, n_max).  The right
    # hand side is piecewise linear in omega with slope < 1 when rho < 1, so
    # exactly one segment between breakpoints holds the root.
    breaks = np.unique(np.concatenate(([0.0], 1.0 / x, n_max / x, [np.inf])))
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        mid = 0.5 * (lo + hi) if np.isfinite(hi) else lo + 1.0
        demand = mid * x
        low, high = demand <= 1.0, demand >= n_max
        free = ~(low | high)
        c_eff = c + w[low].sum() + n_max * w[high].sum()
        rho_free = float(w[free] @ x[free])
        if rho_free >= 1.0:
            continue
        omega = c_eff / (1.0 - rho_free)
        if lo <= omega <= hi:
            return omega
    raise AssertionError("no fixed point found")  # unreachable for rho < 1


def effective_round(params: ChannelParams, w: Vec, x: Vec) -> float:
    """Mean round length consistent with every station's projected aggregation.

    Equals ``c / (1 - rho)`` while no station is clamped; clamped stations
    contribute a fixed ``w_i * 1`` or ``w_i * n_max`` instead.
    """
    w, x = _vectors(params, w, x)
    rho = float(w @ x)
    if rho >= 1.0:
        return params.c + params.n_max * float(w.sum())
    f = params.c * x / (1.0 - rho)
    if np.all((f >= 1.0) & (f <= params.n_max)):
        return params.c / (1.0 - rho)
    return _round_fixed_point(params.c, w, x, params.n_max)


def mean_round_duration(params: ChannelParams, w: Vec, n_bar) -> float:
    """``c + w @ n_bar``."""
    w = np.atleast_1d(np.asarray(w.w if isinstance(w, RateVector) else w, dtype=float))
    n_bar = np.atleast_1d(np.asarray(n_bar, dtype=float))
    if len(w) != len(n_bar):
        raise UsageError("w and n_bar differ in length")
    return float(params.c + w @ n_bar)


def delay_bound(params: ChannelParams, w: Vec, x: Vec) -> np.ndarray:
    """Upper bound on mean queueing delay, ``max(min(c/(1-rho), n_max/x), 1/x)``."""
    w, x = _vectors(params, w, x)
    rho = float(w @ x)
    inner = params.c / (1.0 - rho) if rho < 1.0 else np.inf
    return np.maximum(np.minimum(inner, params.n_max / x), 1.0 / x)


def fluctuation_std(params: ChannelParams, w: Vec, x: Vec) -> np.ndarray:
    """Stationary std of per-frame aggregation, ``x * sigma_C / sqrt(1 - rho**2)``."""
    w, x = _vectors(params, w, x)
    rho = float(w @ x)
    if rho >= 1.0:
        raise UnstableError(f"load factor {rho:.4g} >= 1 has no stationary fluctuations")
    return x * params.overhead_std / np.sqrt(1.0 - rho**2)


def simulate_fluctuations(
    params: ChannelParams,
    w: Vec,
    x: Vec,
    rounds: int,
    seed=None,
    eta0=None,
) -> np.ndarray:
    """Iterate the fluctuation recursion; returns ``eta[1..rounds]`` as ``(rounds, n)``.

    Round overhead deviations are the sum of ``n`` independent zero-mean
    uniform backoffs of width ``params.backoff_width``.
    """
    w, x = _vectors(params, w, x)
    rho = float(w @ x)
    if rho >= 1.0:
        raise UnstableError(f"load factor {rho:.4g} >= 1")
    if rounds < 1:
        raise UsageError("rounds must be >= 1")
    rng = np.random.default_rng(seed)
    half = params.backoff_width / 2.0
    zeta = rng.uniform(-half, half, size=(rounds, params.n_stations)).sum(axis=1)
    u0 = 0.0 if eta0 is None else float(w @ np.asarray(eta0, dtype=float))
    # s[f] = w @ eta[f] + zeta[f] obeys s[f] = rho * s[f-1] + zeta[f].
    s, _ = lfilter([1.0], [1.0, -rho], zeta, zi=[u0])
    return np.outer(s, x)


def time_constant(params: ChannelParams, w: Vec, x: Vec) -> float:
    """Decay time of fluctuations in seconds: ``E[round] / |ln rho|``."""
    w, x = _vectors(params, w, x)
    rho = float(w @ x)
    if not 0.0 < rho < 1.0:
        raise UnstableError(f"time constant undefined for load factor {rho:.4g}")
    return float(params.c / (1.0 - rho) / abs(np.log(rho)))


def classify_regime(params: ChannelParams, w: Vec, x: Vec) -> Tuple[Regime, ...]:
    """Label each station saturated, linear or transition.

    A station is saturated when its demand per round reaches ``n_max``
    (or ``rho >= 1``), and in transition when the demand plus two
    fluctuation std does.
    """
    w, x = _vectors(params, w, x)
    rho = float(w @ x)
    if rho >= 1.0:
        return (Regime.SATURATED,) * len(x)
    demand = effective_round(params, w, x) * x
    std = fluctuation_std(params, w, x)
    out = []
    for d, s in zip(demand, std):
        if d >= params.n_max:
            out.append(Regime.SATURATED)
        elif d + TRANSITION_SIGMAS * s >= params.n_max:
            out.append(Regime.TRANSITION)
        else:
            out.append(Regime.LINEAR)
    return tuple(out)


def mean_aggregation(params: ChannelParams, w: Vec, x: Vec) -> ModelResult:
    """Mean packets per frame for every station, plus the derived statistics."""
    w, x = _vectors(params, w, x)
    rho = float(w @ x)
    f = unclamped_aggregation(params, w, x)
    bound = delay_bound(params, w, x)
    if rho >= 1.0:
        n_bar = np.full_like(x, float(params.n_max))
        return ModelResult(
            n_bar=n_bar,
            n_bar_unclamped=f,
            rho=rho,
            regime=(Regime.SATURATED,) * len(x),
            mean_round=mean_round_duration(params, w, n_bar),
            delay_bound=bound,
            fluct_std=np.full_like(x, np.nan),
            tau=float("nan"),
        )
    if np.all((f >= 1.0) & (f <= params.n_max)):
        n_bar = f.copy()
    else:
        n_bar = project(effective_round(params, w, x) * x, params.n_max)
    return ModelResult(
        n_bar=n_bar,
        n_bar_unclamped=f,
        rho=rho,
        regime=classify_regime(params, w, x),
        mean_round=mean_round_duration(params, w, n_bar),
        delay_bound=bound,
        fluct_std=fluctuation_std(params, w, x),
        tau=time_constant(params, w, x),
    )


def rate_for_delay_target(
    params: ChannelParams, w: Vec, target_delay: float
) -> LoadVector:
    """Symmetric send rate whose delay bound equals ``target_delay``.

    The implied aggregation ``x * target_delay`` is projected onto
    ``[1, n_max]``; when projected, the rate is recomputed so that the model
    aggregation equals the projected value.
    """
    w = np.atleast_1d(np.asarray(w.w if isinstance(w, RateVector) else w, dtype=float))
    n = params.n_stations
    if len(w) != n:
        raise UsageError(f"expected {n} airtimes, got {len(w)}")
    if not np.allclose(w, w[0], rtol=1e-12, atol=0.0):
        raise UsageError("rate_for_delay_target needs symmetric stations")
    if target_delay <= params.c:
        raise InfeasibleError(
            f"target delay {target_delay:.4g}s does not exceed overhead c={params.c:.4g}s"
        )
    w0 = float(w[0])
    x = (1.0 - params.c / target_delay) / (n * w0)
    agg = x * target_delay
    capped = float(project(agg, params.n_max))
    if capped != agg:
        x = capped / (params.c + n * w0 * capped)
    return LoadVector(np.full(n, x))
