from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pacedagg.errors import ConfigError, DomainError, UsageError
from pacedagg.phy import (
    ChannelParams, GuardInterval, McsConfig, build_rate_vector, harmonic_mean_rate,
    phy_rate, rate_table, vht_rate,
)

MBPS = 1e6

# Published 802.11ac 80 MHz VHT rates (Mbps), one row per NSS, MCS 0..9.
PUBLISHED_LONG_GI = {
    1: [29.3, 58.5, 87.8, 117, 175.5, 234, 263.3, 292.5, 351, 390],
    2: [58.5, 117, 175.5, 234, 351, 468, 526.5, 585, 702, 780],
    3: [87.8, 175.5, 263.3, 351, 526.5, 702, 789.8, 877.5, 1053, 1170],
}
PUBLISHED_SHORT_GI = {
    1: [32.5, 65, 97.5, 130, 195, 260, 292.5, 325, 390, 433.3],
    2: [65, 130, 195, 260, 390, 520, 585, 650, 780, 866.7],
    3: [97.5, 195, 292.5, 390, 585, 780, 877.5, 975, 1170, 1300],
}


@pytest.mark.parametrize("gi,table", [("long", PUBLISHED_LONG_GI), ("short", PUBLISHED_SHORT_GI)])
def test_table_matches_published_values(gi, table):
    for nss, row in table.items():
        for mcs, mbps in enumerate(row):
            # Published tables round to 0.1 Mbps.
            assert phy_rate(McsConfig(mcs, nss, guard_interval=gi)) / MBPS == pytest.approx(mbps, abs=0.051)


def test_table_matches_ofdm_formula():
    table = rate_table()
    assert len(table) == 60
    for (mcs, nss, gi), rate in table.items():
        assert rate == float(vht_rate(McsConfig(mcs, nss, guard_interval=gi)))


def test_paper_anchor_rates():
    assert phy_rate(McsConfig(0, 3)) / MBPS == pytest.approx(87.8, abs=0.05)
    assert phy_rate(McsConfig(9, 3)) / MBPS == pytest.approx(1170.0)
    assert phy_rate(McsConfig(0, 1)) / MBPS == pytest.approx(87.8 / 3, abs=0.05)


def test_nss_linear_scaling_all_entries():
    for (mcs, nss, gi), rate in rate_table().items():
        assert rate == pytest.approx(nss * phy_rate(McsConfig(mcs, 1, guard_interval=gi)), rel=1e-12)


def test_default_guard_interval_is_long():
    assert McsConfig(3, 2).guard_interval is GuardInterval.LONG


@pytest.mark.parametrize("kw", [dict(mcs_index=10), dict(mcs_index=-1), dict(nss=0), dict(nss=4),
                                dict(channel_width=40), dict(channel_width=160)])
def test_invalid_mcs_config(kw):
    args = dict(mcs_index=0, nss=1) | kw
    with pytest.raises(ConfigError):
        McsConfig(**args)


def test_harmonic_mean_examples():
    assert harmonic_mean_rate([585 * MBPS]) == pytest.approx(585 * MBPS)
    assert harmonic_mean_rate([100, 100, 100]) == pytest.approx(100)
    assert harmonic_mean_rate([100 * MBPS, 400 * MBPS]) == pytest.approx(160 * MBPS)


def test_harmonic_mean_first_order_approximation():
    # E[1/R] ~ 1/E[R] + Var(R)/E[R]^3 for small spread.
    r = np.random.default_rng(0).normal(500.0, 5.0, 20000)
    approx = 1.0 / (1.0 / r.mean() + r.var() / r.mean() ** 3)
    assert harmonic_mean_rate(r) == pytest.approx(approx, rel=1e-5)


@given(st.lists(st.floats(1e6, 2e9), min_size=1, max_size=30))
def test_harmonic_at_most_arithmetic(samples):
    h = harmonic_mean_rate(samples)
    assert h <= np.mean(samples) * (1 + 1e-12)
    if len(set(samples)) > 1 and (max(samples) - min(samples)) / max(samples) > 1e-6:
        assert h < np.mean(samples)


@pytest.mark.parametrize("bad", [[], [100.0, 0.0], [-5.0], [float("nan")]])
def test_harmonic_mean_domain_errors(bad):
    with pytest.raises(DomainError):
        harmonic_mean_rate(bad)


def test_rate_vector_single_station():
    ch = ChannelParams(c=270e-6)
    rv = build_rate_vector(ch, [585 * MBPS])
    assert ch.frame_bits == 12208
    assert rv.w[0] == pytest.approx(float(Fraction(12208, 585_000_000)), rel=1e-15)
    assert rv.w[0] * 1e6 == pytest.approx(20.87, abs=0.005)


def test_rate_vector_unit_construction():
    ch = ChannelParams(c=1e-4, packet_len=1000, mac_overhead=0)
    assert build_rate_vector(ch, [1000.0]).w[0] == 1.0


def test_rate_vector_two_stations_ratio():
    ch = ChannelParams(c=320e-6, n_stations=2)
    rv = build_rate_vector(ch, [1170 * MBPS, 117 * MBPS])
    assert rv.w * 1e6 == pytest.approx([10.43, 104.3], abs=0.05)
    assert rv.w[1] / rv.w[0] == pytest.approx(10.0, rel=1e-15)


def test_rate_vector_from_mcs_and_explicit_mix():
    ch = ChannelParams(c=320e-6, n_stations=2)
    rv = build_rate_vector(ch, [McsConfig(9, 3), 585 * MBPS])
    assert rv.r_bar.tolist() == [1170 * MBPS, 585 * MBPS]


@given(st.integers(100, 20000), st.integers(0, 2000), st.floats(1e6, 2e9))
def test_rate_vector_homogeneous(l, l_oh, rate):
    one = build_rate_vector(ChannelParams(c=1e-4, packet_len=l, mac_overhead=l_oh), [rate])
    two = build_rate_vector(ChannelParams(c=1e-4, packet_len=2 * l, mac_overhead=2 * l_oh), [rate])
    assert two.w[0] == pytest.approx(2 * one.w[0], rel=1e-14)


def test_rate_vector_airtime_decreasing_in_rate():
    ch = ChannelParams(c=1e-4, n_stations=10)
    rv = build_rate_vector(ch, [McsConfig(m, 2) for m in range(10)])
    assert np.all(np.diff(rv.w) < 0)


def test_rate_vector_errors():
    ch = ChannelParams(c=270e-6, n_stations=2)
    with pytest.raises(UsageError):
        build_rate_vector(ch, [1e8])
    with pytest.raises(DomainError):
        build_rate_vector(ch, [1e8, 0.0])


def test_channel_defaults():
    ch = ChannelParams.default(1)
    assert ch.c == 270e-6 and ChannelParams.default(2).c == 320e-6
    assert ChannelParams.default(5).c == pytest.approx(5 * 200e-6)
    assert ch.backoff_width == pytest.approx(135e-6)
    assert ch.overhead_std == pytest.approx(38.97e-6, abs=0.01e-6)
    assert ChannelParams.default(4).overhead_std == pytest.approx(2 * 135e-6 / np.sqrt(12))
    assert ch.n_max == 64 and ch.packet_len == 12000 and ch.mac_overhead == 208


@pytest.mark.parametrize("kw", [dict(c=0.0), dict(c=-1.0), dict(c=1e-4, packet_len=0),
                                dict(c=1e-4, mac_overhead=-1), dict(c=1e-4, n_max=0),
                                dict(c=1e-4, n_stations=0)])
def test_channel_invariants(kw):
    with pytest.raises(ConfigError):
        ChannelParams(**kw)
