# # Teleporting a single photon
#
# The CF of the output is the input CF times a Gaussian factor, so the
# non-Gaussian input never needs a covariance matrix.  We sample the CF of
# |1> on a grid, push it through a squeezed resource, and look at the photon
# number and the Wigner function.

import numpy as np

from cfteleport import TwoModeCovariance
from cfteleport.cf_engine import Fock, build_cf, fidelity_overlap, mean_photon, teleport_cf, wigner_transform

grid = build_cf(Fock(1), extent=6.0, n=257)
print("input photons:", mean_photon(grid).value)

# Photon numbers add: <n_out> = 1 + N_added.

for r in [0.0, 0.25, 0.5, 1.0, 2.0]:
    out = teleport_cf(grid, TwoModeCovariance.tmsv(r))
    w = wigner_transform(out)
    print(
        f"r={r:4}  <n>={mean_photon(out).value:.5f}  1+exp(-2r)={1 + np.exp(-2 * r):.5f}  "
        f"F={fidelity_overlap(grid, out):.4f}  min W={w.values.min():+.4f}"
    )

# The Wigner negativity of |1> survives only when the added noise is below
# one half, i.e. r > ln(2)/2 ~ 0.347.

r_star = np.log(2) / 2
for r in [r_star - 0.05, r_star, r_star + 0.05]:
    w = wigner_transform(teleport_cf(grid, TwoModeCovariance.tmsv(r)))
    print(f"r={r:.3f}  W(0,0)={w.values[60, 60]:+.2e}")
