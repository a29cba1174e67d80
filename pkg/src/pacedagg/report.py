"""CSV, SVG and text summaries of comparison rows."""
from __future__ import annotations

import csv
import io
import math
from collections import OrderedDict
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from .errors import UsageError
from .harness import ComparisonRow, Thresholds, evaluate

COLUMNS = tuple(f.name for f in fields(ComparisonRow))
_INT = {"replication", "seed", "station", "sim_blocked"}
_FLOAT = {
    f.name for f in fields(ComparisonRow) if f.type in ("float", float)
}
_CHECK = {"agg_check", "std_check", "delay_check"}


def _cell(name: str, value) -> str:
    if name in _CHECK:
        return "" if value is None else ("pass" if value else "fail")
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_cell(c, getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def read_rows(path) -> List[ComparisonRow]:
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            kw = {}
            for c in COLUMNS:
                v = rec[c]
                if c in _CHECK:
                    kw[c] = None if v == "" else v == "pass"
                elif c in _INT:
                    kw[c] = int(v)
                elif c in _FLOAT:
                    kw[c] = float(v)
                else:
                    kw[c] = v
            out.append(ComparisonRow(**kw))
    return out


@dataclass
class SweepSummary:
    name: str
    rows: int
    flagged: int
    failures: int
    max_agg_err: float
    mean_agg_err: float
    max_std_err: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class Summary:
    sweeps: List[SweepSummary]
    text: str

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sweeps)


def _by_sweep(rows) -> Dict[str, List[ComparisonRow]]:
    groups: Dict[str, List[ComparisonRow]] = OrderedDict()
    for r in rows:
        groups.setdefault(r.sweep, []).append(r)
    return groups


def _nanstat(fn, values) -> float:
    v = np.abs(np.array([x for x in values if math.isfinite(x)]))
    return float(fn(v)) if v.size else math.nan


def summarize(rows: Sequence[ComparisonRow]) -> Summary:
    sweeps = []
    lines = []
    for name, group in _by_sweep(rows).items():
        ok = [r for r in group if not r.flagged]
        s = SweepSummary(
            name=name,
            rows=len(group),
            flagged=len(group) - len(ok),
            failures=sum(not r.passed for r in ok),
            max_agg_err=_nanstat(np.max, [r.agg_rel_err for r in ok]),
            mean_agg_err=_nanstat(np.mean, [r.agg_rel_err for r in ok]),
            max_std_err=_nanstat(
                np.max, [r.std_rel_err for r in ok if r.std_check is not None and r.regime == "linear"]
            ),
        )
        sweeps.append(s)
        lines.append(
            f"{name}: {'PASS' if s.passed else 'FAIL'} rows={s.rows} flagged={s.flagged} "
            f"failures={s.failures} max|agg err|={s.max_agg_err:.4f} "
            f"mean|agg err|={s.mean_agg_err:.4f} max|std err|={s.max_std_err:.4f}"
        )
        for r in ok:
            if not r.passed:
                lines.append(
                    f"  fail {r.scenario} rep={r.replication} seed={r.seed} hash={r.config_hash} "
                    f"station={r.station} agg={r.agg_check} std={r.std_check} delay={r.delay_check}"
                )
    overall = all(s.passed for s in sweeps)
    lines.append(f"overall: {'PASS' if overall else 'FAIL'}")
    return Summary(sweeps, "\n".join(lines) + "\n")


def plot_sweep(rows: Sequence[ComparisonRow], path) -> None:
    """Model curve and simulated mean +- spread for aggregation and its std."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "pacedagg"
    ok = [r for r in rows if not r.flagged]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    for st in sorted({r.station for r in ok}):
        sel = [r for r in ok if r.station == st]
        pts = sorted({r.point for r in sel})
        model_n = [next(r.model_n_bar for r in sel if r.point == p) for p in pts]
        model_s = [next(r.model_fluct_std for r in sel if r.point == p) for p in pts]
        agg = [[r.sim_mean_agg for r in sel if r.point == p] for p in pts]
        std = [[r.sim_std_agg for r in sel if r.point == p] for p in pts]
        (line,) = ax1.plot(pts, model_n, "-", label=f"model sta {st + 1}")
        ax1.errorbar(pts, [np.mean(a) for a in agg], yerr=[np.std(a) for a in agg],
                     fmt="o", color=line.get_color(), mfc="none", label=f"sim sta {st + 1}")
        ax2.plot(pts, model_s, "-", color=line.get_color())
        ax2.errorbar(pts, [np.mean(s) for s in std], yerr=[np.std(s) for s in std],
                     fmt="o", color=line.get_color(), mfc="none")
    axis = ok[0].axis if ok else ""
    ax1.set_xlabel(axis)
    ax1.set_ylabel("packets per frame")
    ax2.set_xlabel(axis)
    ax2.set_ylabel("std of packets per frame")
    ax1.legend(fontsize="small")
    fig.suptitle(rows[0].sweep)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_report(
    rows: Sequence[ComparisonRow], outdir, overrides: Optional[Mapping[str, object]] = None
) -> Summary:
    """Write ``results.csv``, one ``<sweep>.svg`` per sweep and ``summary.txt``.

    ``overrides`` (threshold name -> value) re-evaluates every row first,
    keeping each row's own check selection unless ``checks`` is overridden.
    """
    rows = list(rows)
    if not rows:
        raise UsageError("no comparison rows to report")
    if overrides:
        rows = [
            evaluate(r, Thresholds(checks=r.checks or Thresholds().checks).override(**overrides))
            for r in rows
        ]
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "results.csv").write_text(rows_csv(rows))
        for name, group in _by_sweep(rows).items():
            plot_sweep(group, outdir / f"{name}.svg")
        summary = summarize(rows)
        (outdir / "summary.txt").write_text(summary.text)
    except OSError as exc:
        raise OSError(f"writing report to {outdir}: {exc}") from exc
    return summary
