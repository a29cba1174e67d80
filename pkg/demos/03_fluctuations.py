"""
Fluctuations about the mean
===========================

Random backoff makes each round slightly longer or shorter, which changes
how many packets queue for the next frame.  The result is an AR(1) process
with coefficient ``rho``.
"""
import numpy as np

from pacedagg import ChannelParams, fluctuation_std, simulate_fluctuations, time_constant

ch = ChannelParams.default(1)
w = [12208 / 585e6]

for x in (5000.0, 15000.0, 30000.0, 40000.0):
    eta = simulate_fluctuations(ch, w, [x], 200_000, seed=0)[:, 0]
    print(f"x={x:7.0f}/s  rho={w[0] * x:.2f}  std model {fluctuation_std(ch, w, [x])[0]:.3f}  "
          f"monte carlo {eta.std():.3f}  tau {time_constant(ch, w, [x]) * 1e3:.3f} ms")

###############################################################################
# The lag-k autocorrelation decays like rho**k.
x = 30000.0
eta = simulate_fluctuations(ch, w, [x], 200_000, seed=1)[:, 0]
eta = eta - eta.mean()
acf = [float(eta[:-k] @ eta[k:] / (eta @ eta)) for k in range(1, 6)]
print(np.round(acf, 3), np.round((w[0] * x) ** np.arange(1, 6), 3))
