"""
Mean aggregation level
======================

A single station at MCS 9 / NSS 2 with 270 us of per-round overhead.  The
model aggregation grows like ``c x / (1 - rho)`` and is then capped at 64.
"""
import numpy as np

from pacedagg import ChannelParams, McsConfig, build_rate_vector, mean_aggregation

ch = ChannelParams.default(1)
w = build_rate_vector(ch, [McsConfig(9, 2)]).w
saturation = 1.0 / w[0]  # packets/s at rho = 1
print(f"airtime per packet {w[0] * 1e6:.2f} us, saturation {saturation * 12000 / 1e6:.0f} Mbps")

for frac in np.linspace(0.05, 0.95, 10):
    res = mean_aggregation(ch, w, [frac * saturation])
    print(f"load {frac:.2f}  N = {res.n_bar[0]:6.2f}  ({res.regime[0].value}, "
          f"delay bound {res.delay_bound[0] * 1e3:.3f} ms)")

###############################################################################
# Two stations share a channel: the ratio of their aggregation levels is the
# ratio of their send rates while neither is clamped.
ch2 = ChannelParams.default(2)
w2 = build_rate_vector(ch2, [McsConfig(9, 1), McsConfig(3, 1)]).w
res = mean_aggregation(ch2, w2, [12000.0, 4000.0])
print(res.n_bar, res.n_bar[0] / res.n_bar[1])
