"""Command line entry point: ``pacedagg {model,sim,sweep,report}``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import harness, model, report, scenarios, sim, traceio
from .errors import AggError, UsageError


def _thresholds(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--threshold expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _specs(args):
    specs = [cfgmod.load_sweep(p) for p in args.config]
    registry = {s.name: s for s in scenarios.all_sweeps()}
    for name in args.builtin or ():
        if name == "all":
            specs.extend(registry.values())
        elif name in registry:
            specs.append(registry[name])
        else:
            raise UsageError(f"unknown builtin sweep {name!r}; choose from {sorted(registry)} or all")
    if not specs:
        raise UsageError("give at least one sweep file or --builtin name")
    out = []
    for s in specs:
        base = s.base
        if getattr(args, "rounds", None):
            base = replace(base, rounds=args.rounds, duration=None)
        if getattr(args, "duration", None):
            base = replace(base, duration=args.duration, rounds=None)
        if getattr(args, "seed", None) is not None:
            base = replace(base, seed=args.seed)
            s = replace(s, seeds=None)
        kw = dict(base=base)
        if getattr(args, "replications", None):
            kw.update(replications=args.replications, seeds=None)
        overrides = _thresholds(getattr(args, "threshold", None))
        if overrides:
            kw["thresholds"] = s.thresholds.override(**overrides)
        out.append(replace(s, **kw))
    return out


def cmd_model(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    if args.tau_grid:
        grid = harness.tau_grid(
            target_delay=args.target_delay, frame_overhead=args.frame_overhead_us * 1e-6
        )
        w.writerow(["n_stations", "nss", "mcs", "tau_s"])
        for a, b, k in np.ndindex(grid.shape):
            w.writerow([a + 1, b + 1, k, repr(float(grid[a, b, k]))])
        return 0
    w.writerow(["sweep", "point", "station", "send_rate", "rho", "regime", "n_bar",
                "n_bar_unclamped", "mean_round", "delay_bound", "fluct_std", "tau"])
    for spec in _specs(args):
        for p in spec.points:
            try:
                ch, rv, x = harness.model_inputs(spec.config_at(p))
                m = model.mean_aggregation(ch, rv, x)
            except AggError as exc:
                w.writerow([spec.name, p, "", "", "", f"error: {exc}"])
                continue
            for i in range(ch.n_stations):
                w.writerow([spec.name, p, i, repr(float(x.x[i])), repr(m.rho), m.regime[i].value,
                            repr(float(m.n_bar[i])), repr(float(m.n_bar_unclamped[i])),
                            repr(m.mean_round), repr(float(m.delay_bound[i])),
                            repr(float(m.fluct_std[i])), repr(m.tau)])
    return 0


def cmd_sim(args) -> int:
    spec = _specs(args)[0]
    point = spec.points[0] if args.point is None else args.point
    config = spec.config_at(point)
    trace = sim.run(config)
    st = sim.collect_stats(trace, config.warmup_fraction)
    if args.trace_dir:
        traceio.write_trace_csv(trace, args.trace_dir)
    print(f"# {spec.name} {spec.axis.value}={point:g} seed={config.seed} "
          f"hash={harness.config_hash(config)} rounds={st.rounds_used} "
          f"mean_round={st.mean_round:.6g}s")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["station", "mean_agg", "std_agg", "mean_delay", "p95_delay", "throughput",
                "mean_airtime", "blocked_rounds"])
    for i in range(trace.n_stations):
        w.writerow([i, f"{st.mean_agg[i]:.6g}", f"{st.std_agg[i]:.6g}", f"{st.mean_delay[i]:.6g}",
                    f"{st.p95_delay[i]:.6g}", f"{st.throughput[i]:.6g}",
                    f"{st.mean_airtime[i]:.6g}", int(st.blocked_rounds[i])])
    return 0


def cmd_sweep(args) -> int:
    rows = []
    for spec in _specs(args):
        logging.info("running %s (%d points x %d replications)",
                     spec.name, len(spec.points), spec.replications)
        rows.extend(harness.run_sweep(spec, jobs=args.jobs))
    summary = report.emit_report(rows, args.out)
    sys.stdout.write(summary.text)
    return 0 if summary.passed else 1


def cmd_report(args) -> int:
    rows = report.read_rows(args.results)
    summary = report.emit_report(
        rows, args.out or Path(args.results).parent, _thresholds(args.threshold)
    )
    sys.stdout.write(summary.text)
    return 0 if summary.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pacedagg", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def sweep_source(p):
        p.add_argument("config", nargs="*", help="TOML sweep file(s)")
        p.add_argument("--builtin", action="append", metavar="NAME",
                       help="built-in replica sweep (repeatable), or 'all'")

    p = sub.add_parser("model", help="closed-form model only")
    sweep_source(p)
    p.add_argument("--tau-grid", action="store_true", help="time constant over n x NSS x MCS")
    p.add_argument("--target-delay", type=float, default=5e-3)
    p.add_argument("--frame-overhead-us", type=float, default=200.0)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("sim", help="simulate one scenario")
    sweep_source(p)
    p.add_argument("--point", type=float, help="sweep point (default: first)")
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--duration", type=float, help="seconds of simulated time")
    p.add_argument("--trace-dir", help="write rounds.csv and packets.csv here")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("sweep", help="model vs simulator comparison")
    sweep_source(p)
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--seed", type=int, help="base seed; replications use seed + k")
    p.add_argument("--rounds", type=int)
    p.add_argument("--duration", type=float)
    p.add_argument("--replications", type=int)
    p.add_argument("--threshold", action="append", metavar="KEY=VALUE")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="re-render a results.csv")
    p.add_argument("results")
    p.add_argument("--out", help="output directory (default: next to results)")
    p.add_argument("--threshold", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep" and not (args.config or args.builtin):
        build_parser().error("sweep needs a config file or --builtin")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except AggError as exc:
        print(f"pacedagg: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
