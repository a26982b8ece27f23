"""
Two products under self-social dynamics
=======================================

With two products the self-social model reduces to a map on ``[0, 1]**n``
(the probability of holding product 2). Its fixed point is unique, and we
can bound where it lies and say when it is stable.
"""

import numpy as np

from competprop import TwoProduct, check_stability, fixed_point_bounds, solve_two_product_fixed_point
from competprop.analysis import global_stability_threshold, local_stability_threshold
from competprop.generators import erdos_renyi

params = TwoProduct(delta11=0.3, delta22=0.5)  # product 2 is stickier
net = erdos_renyi(20, 0.3, seed=5)
alpha = np.random.default_rng(5).uniform(0.05, 0.9, net.n)

# %%
# The fixed point, with the iteration's own convergence report.
p, info = solve_two_product_fixed_point(params, net, alpha, full_output=True)
print("fixed point range", p.min().round(5), "to", p.max().round(5))
print("iterations", info.iterations, "measured rate", round(info.rate_estimate, 4))

# %%
# Every entry lies between 1/2 and delta12 / (delta12 + delta21) = 0.7 / 1.2,
# and each node's lead over its neighbourhood is bounded.
b = fixed_point_bounds(params, alpha)
print("interval", np.round(b.interval, 5))
print("gap bound holds:", bool(np.all(p - net.normalized @ p <= b.node_gap_bound)))

# %%
# Stability: the thresholds depend only on the self-conversion probabilities.
print("local threshold ", local_stability_threshold(params), "= 1.2/1.24")
print("global threshold", global_stability_threshold(params), "= 0.8/1.2")
rep = check_stability(net, alpha, params, p)
print("nodes meeting the local condition :", rep.local_sufficient.sum(), "of", net.n)
print("nodes meeting the global condition:", rep.global_sufficient.sum(), "of", net.n)
print("Jacobian spectral radius", round(rep.spectral_radius, 4), "max |imag|", rep.max_imag)
