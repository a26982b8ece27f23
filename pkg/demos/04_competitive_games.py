"""
Companies competing with budgets
================================

Two companies split their budgets between seeding (paying individuals to
behave like a loyal neighbour) and product quality. Every stage they play
the one-shot Nash equilibrium computed from the current adoption state.
"""

import numpy as np

from competprop import GameConfig, best_response_check, nash_allocation, run_closed_loop
from competprop.games import SEEDING_ONLY, budget_threshold, seeding_only_rate_bound
from competprop.generators import erdos_renyi

net = erdos_renyi(5, 0.5, seed=8)
alpha = np.array([0.8, 0.85, 0.75, 0.84, 0.76])
budgets = np.array([600.0, 900.0])
game = GameConfig(net, alpha, budgets, gamma=100.0)
P0 = np.random.default_rng(0).dirichlet(np.ones(2), size=5)

# %%
# The interior equilibrium needs each budget above a threshold.
print("seeding-quality threshold", round(budget_threshold(game), 2))

# %%
# Both companies at Nash: after one step all rows of P agree, and the average
# adoption approaches the budget shares (0.4, 0.6) at rate 0.25 per step.
run = run_closed_loop(game, P0, 60)
for t in (0, 1, 2, 5, 10, 60):
    print(f"t={t:2d} average adoption {run.average_adoption[t].round(10)}")

# %%
# The closed form is a genuine equilibrium: no sampled deviation helps.
alloc = nash_allocation(game, run.P[3])
for r in range(2):
    rep = best_response_check(game, run.P[3], alloc, r, trials=10_000)
    print(f"company {r + 1}: best deviation gain {rep.max_gain:.2e} ok={rep.ok}")

# %%
# Company 1 stays at Nash while company 2 allocates at random: company 1's
# payoff goes up.
mixed = run_closed_loop(game, P0, 60, policies=["nash", "random"], seed=1)
print("company 1 mean payoff, both Nash   ", run.payoffs[1:, 0].mean().round(4))
print("company 1 mean payoff, vs random   ", mixed.payoffs[1:, 0].mean().round(4))

# %%
# Seeding only, with a fixed product-conversion matrix: the closed loop is a
# contraction with a computable modulus.
delta = np.array([[0.7, 0.3], [0.4, 0.6]])
only = GameConfig(net, alpha, budgets, 100.0, mode=SEEDING_ONLY, delta=delta)
print("seeding-only threshold", round(budget_threshold(only), 2), "rate bound", round(seeding_only_rate_bound(only), 4))
print("final average adoption", run_closed_loop(only, P0, 60).average_adoption[-1].round(6))
