import math
from dataclasses import replace

import numpy as np
import pytest

from pacedagg import scenarios
from pacedagg.errors import ConfigError, UsageError
from pacedagg.harness import (
    Axis, ComparisonRow, SweepSpec, Thresholds, config_hash, evaluate, model_inputs, run_sweep,
    tau_grid,
)
from pacedagg.model import load_factor
from pacedagg.phy import ChannelParams, McsConfig
from pacedagg.sim import SimConfig, StationProfile


def _base(n=1, rounds=1500, mcs=McsConfig(9, 2)):
    ch = ChannelParams.default(n)
    return SimConfig([StationProfile(5000.0, mcs=mcs)] * n, ch, rounds=rounds, seed=3)


def test_sweep_spec_validation():
    with pytest.raises(UsageError):
        SweepSpec("s", "send_rate", (), _base())
    with pytest.raises(UsageError):
        SweepSpec("s", "send_rate", (1,), _base(), replications=0)
    with pytest.raises(UsageError):
        SweepSpec("s", "send_rate", (1,), _base(), replications=2, seeds=(1,))
    with pytest.raises(UsageError):
        SweepSpec("s", "send_rate", (1,), _base(), point_unit="pps")
    with pytest.raises(UsageError):
        SweepSpec("s", "rate_split", (0.5,), _base(2), split_start=(1.0,), split_end=(2.0, 3.0))
    with pytest.raises(ValueError):
        SweepSpec("s", "bogus", (1,), _base())


def test_replication_seeds():
    assert SweepSpec("s", "mcs", (1,), _base(), replications=3).replication_seeds == (3, 4, 5)
    assert SweepSpec("s", "mcs", (1,), _base(), replications=2, seeds=(9, 8)).replication_seeds == (9, 8)


def test_config_at_each_axis():
    b = _base(2)
    x = SweepSpec("s", "send_rate", (120,), b).config_at(120)
    assert x.stations[0].send_rate == pytest.approx(1e4)
    sat = SweepSpec("s", "send_rate", (0.5,), b, point_unit="saturation").config_at(0.5)
    _, w, lv = model_inputs(sat)
    assert load_factor(w.w, lv.x) == pytest.approx(0.5)
    assert SweepSpec("s", "mcs", (4,), b).config_at(4).stations[1].mcs.mcs_index == 4
    assert SweepSpec("s", "nss", (3,), b).config_at(3).stations[0].mcs.nss == 3
    n5 = SweepSpec("s", "n_stations", (5,), b).config_at(5)
    assert n5.channel.n_stations == 5 and len(n5.stations) == 5
    assert n5.channel.c == pytest.approx(5 * 160e-6)
    split = SweepSpec("s", "rate_split", (0.5,), b, split_start=(10, 100), split_end=(30, 0))
    rates = [s.send_rate * 12000 / 1e6 for s in split.config_at(0.5).stations]
    assert rates == pytest.approx([20, 50])
    assert SweepSpec("s", "jitter", (24,), b).config_at(24).stations[0].jitter == pytest.approx(24e-6)


def test_mcs_axis_needs_mcs_stations():
    b = SimConfig([StationProfile(1000.0, rate=1e8)], ChannelParams.default(1))
    with pytest.raises(ConfigError):
        SweepSpec("s", "mcs", (3,), b).config_at(3)


def test_config_hash_ignores_seed_only():
    b = _base()
    assert config_hash(b) == config_hash(replace(b, seed=99))
    assert config_hash(b) != config_hash(replace(b, rounds=10))
    assert len(config_hash(b)) == 12


def test_run_sweep_shape_and_determinism():
    spec = SweepSpec("s", "send_rate", (50, 200), _base(2), replications=2,
                     thresholds=Thresholds(checks="agg"))
    rows = run_sweep(spec)
    assert len(rows) == 2 * 2 * 2
    assert [(r.point, r.replication, r.station) for r in rows[:4]] == [
        (50, 0, 0), (50, 0, 1), (50, 1, 0), (50, 1, 1)]
    again = run_sweep(spec)
    assert [r.sim_mean_agg for r in rows] == [r.sim_mean_agg for r in again]
    assert all(r.passed for r in rows)


def test_run_sweep_parallel_matches_serial():
    spec = SweepSpec("s", "send_rate", (50, 200), _base(), replications=1)
    assert [r.sim_std_agg for r in run_sweep(spec)] == [r.sim_std_agg for r in run_sweep(spec, jobs=2)]


def test_infeasible_point_is_flagged_not_fatal():
    spec = SweepSpec("s", "jitter", (6, 500), replace(_base(), stations=[StationProfile(1e4, jitter=0.0, mcs=McsConfig(9, 2))]),
                     replications=1)
    rows = run_sweep(spec)
    assert not rows[0].flagged
    assert rows[1].flagged and rows[1].note.startswith("error")
    assert rows[1].passed  # flagged rows carry no verdict


def _row(**kw):
    base = dict(sweep="s", axis="send_rate", point=1.0, replication=0, seed=0, config_hash="h",
                station=0, regime="linear", model_n_bar=10.0, model_fluct_std=2.0,
                model_delay_bound=1e-3, sim_mean_agg=10.5, sim_std_agg=2.1, sim_mean_delay=0.9e-3,
                sim_mean_airtime=1e-4)
    base.update(kw)
    return ComparisonRow(**base)


def test_evaluate_checks():
    r = evaluate(_row(), Thresholds())
    assert (r.agg_check, r.std_check, r.delay_check) == (True, True, True)
    assert r.agg_rel_err == pytest.approx(0.05)
    assert evaluate(_row(sim_mean_agg=11.5), Thresholds()).agg_check is False
    # Absolute allowance at low aggregation.
    assert evaluate(_row(model_n_bar=2.0, sim_mean_agg=2.9), Thresholds()).agg_check is True
    assert evaluate(_row(sim_std_agg=2.5), Thresholds()).std_check is False
    assert evaluate(_row(model_fluct_std=0.5, sim_std_agg=5.0), Thresholds()).std_check is None
    assert evaluate(_row(sim_mean_delay=1.2e-3), Thresholds()).delay_check is False
    assert evaluate(_row(sim_mean_delay=0.4e-3), Thresholds()).delay_check is False
    assert evaluate(_row(sim_blocked=3, sim_mean_delay=5e-3), Thresholds()).delay_check is None


def test_evaluate_saturated_and_selection():
    sat = _row(regime="saturated", model_n_bar=64.0, sim_mean_agg=64.0, model_fluct_std=math.nan)
    assert evaluate(sat, Thresholds()).std_check is (evaluate(sat, Thresholds()).sim_std_agg < 0.5)
    assert evaluate(replace(sat, sim_std_agg=0.7), Thresholds()).std_check is False
    only = evaluate(_row(sim_std_agg=9.0), Thresholds(checks="agg"))
    assert only.std_check is None and only.passed and only.checks == "agg"
    original = _row()
    evaluate(original, Thresholds(agg_rel=0.0, agg_abs=0.0))
    assert original.agg_check is None  # evaluate copies


def test_thresholds_override():
    th = Thresholds().override(agg_rel="0.2", checks="agg")
    assert th.agg_rel == 0.2 and th.checks == ("agg",)
    with pytest.raises(UsageError):
        Thresholds().override(nope=1)
    with pytest.raises(UsageError):
        Thresholds(checks="agg,speed")


def test_tau_grid_shape_and_bound():
    g = tau_grid()
    assert g.shape == (20, 3, 10)
    assert np.all(g > 0) and g.max() <= 0.15


def test_scenarios_build():
    specs = scenarios.all_sweeps(rounds=100, replications=1)
    names = [s.name for s in specs]
    assert len(names) == len(set(names))
    for s in specs:
        for p in s.points:
            s.config_at(p)


def test_fig1a_replica_curve_shape():
    rows = run_sweep(scenarios.fig1a(1, rounds=1500, replications=1))
    model = [r.model_n_bar for r in rows]
    sim = [r.sim_mean_agg for r in rows]
    assert np.all(np.diff(model) >= 0) and model[-1] == 64
    assert np.all(np.diff(sim) > -0.5) and sim[-1] == pytest.approx(64, abs=0.5)
