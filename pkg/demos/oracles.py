"""
The two oracles behind the reduction
====================================

Each round needs an allocation that is safe against every load vector for
the current dual direction w, and a point of the target set S that is
extreme in direction w.  Here both are compared with brute-force grids.
"""

import numpy as np

from onlineload import DualWeight, compute_allocation, support_point_inf
from onlineload.allocation import grid_allocation_oracle
from onlineload.norms import cstar_inf
from onlineload.support import grid_support_oracle

# the hindsight optimum for fixed loads has a closed form
l = np.array([1.0, 2.0, 4.0])
print("C*(1, 2, 4) =", cstar_inf(l), "  (1 / (1 + 1/2 + 1/4) = 4/7)")

w = DualWeight([-0.2, 0.5, 0.3], [0.3, 0.2, -0.1])

# allocation oracle: water-filling is exact, the grid only approximates it
alloc = compute_allocation(w)
grid = grid_allocation_oracle(w, 1e-3)
print("allocation", np.round(alloc.alpha, 4), "value", round(alloc.value, 6))
print("grid       ", np.round(grid.alpha, 4), "value", round(grid.value, 6))

# support oracle: closed-form KKT solution against a y-grid search
sup = support_point_inf(w)
print("support x", np.round(sup.point.x, 4), "y", np.round(sup.point.y, 4))
print("h_S(w) =", round(sup.h_value, 6), " grid:", round(grid_support_oracle(w, 1e-2).h_value, 6))

# the Blackwell condition: the safe allocation never beats the support value
print("h_S(w) - V(w) =", sup.h_value - alloc.value)
