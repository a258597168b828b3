# # Optimal local squeezing for an asymmetric resource
#
# Without the b1 = b2 symmetry there is no closed form; the optimizer finds
# every local minimum and checks the best against a brute-force grid.

import numpy as np

from cfteleport import StandardFormI, to_standard_form_I
from cfteleport.gaussian_core import random_covariance
from cfteleport.optimizer import grid_oracle, optimize_general

s = StandardFormI(2.0, 1.0, 0.8, -0.5)
res = optimize_general(s)
print(res.v, res.n_min)
print("residuals:", res.residuals)
print("gap to grid search:", res.grid_gap)

# Random states: reduce to standard form, then optimize.

rng = np.random.default_rng(7)
for _ in range(5):
    v = random_covariance(rng)
    sf, _ = to_standard_form_I(v)
    res = optimize_general(sf)
    g_min, _, _ = grid_oracle(sf)
    print(f"b=({sf.b1:.3f},{sf.b2:.3f}) c={sf.c:.3f} d={sf.d:+.3f}  N_min={res.n_min:.6f}  grid={g_min:.6f}")
