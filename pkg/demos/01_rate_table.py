"""
VHT 80 MHz rate table
=====================

PHY rates follow from 234 data subcarriers, the bits per subcarrier of
the modulation, the coding rate and the OFDM symbol time.
"""
import numpy as np

from pacedagg import McsConfig, harmonic_mean_rate, phy_rate
from pacedagg.phy import vht_rate

###############################################################################
# One spatial stream, long guard interval, all ten MCS indices.
for mcs in range(10):
    r = phy_rate(McsConfig(mcs, 1))
    print(f"MCS{mcs}: {r / 1e6:7.1f} Mbps  (exact {vht_rate(McsConfig(mcs, 1))} b/s)")

###############################################################################
# Rates scale linearly with the number of spatial streams.
print([phy_rate(McsConfig(9, nss)) / 1e6 for nss in (1, 2, 3)])

###############################################################################
# When the MCS changes from frame to frame, airtime is set by the harmonic
# mean of the rates, which sits below the arithmetic mean.
rates = np.array([phy_rate(McsConfig(m, 3)) for m in (4, 5, 6, 7, 8)])
print(f"arithmetic {rates.mean() / 1e6:.1f} Mbps, harmonic {harmonic_mean_rate(rates) / 1e6:.1f} Mbps")
