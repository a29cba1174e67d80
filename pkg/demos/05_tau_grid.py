"""
Time constant across the MCS range
==================================

Send rates are picked so that the mean delay is 5 ms, with the aggregation
capped at 64.  While the cap is not reached every MCS shares the same load
factor, so tau only starts to fall once faster rates hit the cap.
"""
import numpy as np

from pacedagg.harness import tau_grid

grid = tau_grid()
print(f"max tau {grid.max() * 1e3:.1f} ms")
np.set_printoptions(precision=1, suppress=True, linewidth=120)
for n in (1, 2, 5, 10, 20):
    print(f"n={n:2d}", grid[n - 1, 0] * 1e3)
