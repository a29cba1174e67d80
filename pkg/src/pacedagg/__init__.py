"""Frame aggregation on a paced 802.11ac downlink: closed-form model, simulator, sweeps."""
from .errors import (
    AggError, ConfigError, DomainError, InfeasibleError, UnstableError, UsageError,
)
from .model import (
    LoadVector, ModelResult, Regime, classify_regime, delay_bound, fluctuation_std,
    mean_aggregation, mean_round_duration, rate_for_delay_target, simulate_fluctuations,
    time_constant,
)
from .phy import (
    ChannelParams, GuardInterval, McsConfig, RateVector, build_rate_vector,
    harmonic_mean_rate, phy_rate,
)
from .sim import (
    SimConfig, SimStats, SimTrace, StationProfile, collect_stats, generate_arrivals, run,
)

__version__ = "0.1.0"
