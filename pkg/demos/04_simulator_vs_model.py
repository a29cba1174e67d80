"""
Simulator against the model
===========================

The packet-level simulator keeps integer packet counts, discrete backoff
slots and jittered arrivals, so it checks the model rather than restating it.
"""
from pacedagg import scenarios
from pacedagg.harness import run_sweep
from pacedagg.report import summarize

spec = scenarios.fig1a(1, fractions=(0.1, 0.3, 0.5, 0.7, 0.9), rounds=5000, replications=1)
for r in run_sweep(spec):
    print(f"load {r.point:.1f}  model {r.model_n_bar:6.2f}  sim {r.sim_mean_agg:6.2f}  "
          f"std model {r.model_fluct_std:5.2f} sim {r.sim_std_agg:5.2f}  {r.regime}")

###############################################################################
# Delay: the model bounds the wait until the frame starts, the simulator
# stamps departures at the frame end, so compare against bound + airtime.
rows = run_sweep(scenarios.fig2d(rounds=5000, replications=1))
for r in rows:
    print(f"load {r.point:.1f}  sim {r.sim_mean_delay * 1e6:7.1f} us  "
          f"bound {r.model_delay_bound * 1e6:7.1f} us  + airtime {r.sim_mean_airtime * 1e6:5.1f} us")
print(summarize(rows).text)
