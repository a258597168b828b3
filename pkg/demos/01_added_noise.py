# # Added noise of Gaussian resources
#
# The teleported state is the input plus a classical Gaussian field whose mean
# photon number we call the added noise.  Here we look at it for the
# two-mode squeezed vacuum, for a thermalized version of it, and for an
# unbalanced homodyne angle.

import numpy as np

from cfteleport import StandardFormI, TwoModeCovariance, added_noise, induced_covariance
from cfteleport.channel import unbalanced_to_balanced
from cfteleport.optimizer import optimize, separability

# A vacuum resource gives exactly one photon of noise, the classical limit.

print("vacuum:", added_noise(TwoModeCovariance.vacuum()))

# Squeezing the resource pushes the noise down as exp(-2r).

for r in [0.25, 0.5, 1.0, 2.0]:
    n = added_noise(TwoModeCovariance.tmsv(r))
    print(f"r={r:4}  N={n:.6f}  exp(-2r)={np.exp(-2 * r):.6f}")

# The induced field always has covariance >= I/2, i.e. it is a classical
# field no matter how entangled the resource.

vm = induced_covariance(TwoModeCovariance.tmsv(1.0)).vm
print(np.linalg.eigvalsh(vm.matrix))

# A symmetric but noisy resource: local squeezing lowers the noise, and the
# best squeeze has a closed form.

s = StandardFormI(1.0, 1.0, 0.6, -0.2)
res = optimize(s)
print("unsqueezed:", added_noise(s.covariance()))
print("optimal squeeze v =", res.v.u1, " N_min =", res.n_min)
print(separability(s))

# Measuring at theta != pi/4 is the same as squeezing Alice's mode first.

v = TwoModeCovariance.tmsv(0.7)
for theta in [0.3, np.pi / 4, 1.2]:
    print(theta, added_noise(v, theta), added_noise(unbalanced_to_balanced(v, theta)))
