"""
Where does the adoption end up?
===============================

The long-run state of the social-self model is decided by the structure of
the product-conversion matrix: its absorbing strongly connected components
(SCCs) and the transient products feeding them.
"""

import numpy as np

from competprop import SOCIAL_SELF, decompose_conversion_graph, predict_asymptotics, trajectory
from competprop.generators import erdos_renyi

net = erdos_renyi(10, 0.4, seed=3)
rng = np.random.default_rng(3)
alpha = rng.uniform(0.05, 0.95, net.n)

# %%
# One strongly connected block: everyone converges to its stationary
# distribution, here (3/7, 4/7), at a geometric rate we can bound up front.
strong = np.array([[0.6, 0.4], [0.3, 0.7]])
P0 = rng.dirichlet(np.ones(2), size=net.n)
pred = predict_asymptotics(net, alpha, strong, P0)
traj = trajectory(SOCIAL_SELF, net, alpha, strong, P0, 100)
dist = np.abs(traj - pred.limit).max(axis=(1, 2))
print(pred.case_label, "limit row", pred.limit[0].round(6), "rate bound", round(pred.rate, 4))
print("   measured per-step ratios (first 5):", (dist[1:6] / dist[:5]).round(3))

# %%
# Two isolated blocks: the split between them is fixed by the start, weighted
# by the stationary vector of the network's consensus matrix. With a uniform
# start each block keeps exactly half.
blocks = np.array([
    [0.6, 0.4, 0.0, 0.0],
    [0.3, 0.7, 0.0, 0.0],
    [0.0, 0.0, 0.5, 0.5],
    [0.0, 0.0, 0.1, 0.9],
])
pred = predict_asymptotics(net, alpha, blocks, np.full((net.n, 4), 0.25))
print(pred.case_label, "limit row", pred.limit[0].round(6), "gammas", pred.gammas.round(6))
print("   expected                ", np.round([3 / 14, 2 / 7, 1 / 12, 5 / 12], 6))

# %%
# Add a transient product that drains into the first block. No closed form
# is known for the split here, so it is read off a run of the model once the
# transient mass is gone (the provenance flag says so).
combined = np.array([
    [0.6, 0.4, 0.0, 0.0],
    [0.3, 0.7, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.8, 0.0, 0.2],
])
g = decompose_conversion_graph(combined)
print("SCCs", [c.tolist() for c in g.sccs], "transient", g.transient.tolist())
for label, P0 in [("random start", rng.dirichlet(np.ones(4), size=net.n)),
                  ("nobody on product 2", np.tile([0.3, 0.3, 0.0, 0.4], (net.n, 1)))]:
    pred = predict_asymptotics(net, alpha, combined, P0)
    print(f"{label:20s} limit {pred.limit[0].round(4)}  gammas {pred.gammas.round(4)} ({pred.gamma_provenance})")
