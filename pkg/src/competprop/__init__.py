"""Competing-product propagation on social networks.

Exact Monte Carlo simulation of the agent-level Markov chains, their
mean-field approximations, asymptotic and stability analysis, and the
budget-allocation games between companies.
"""
from .analysis import (
    AsymptoticPrediction,
    StabilityReport,
    check_stability,
    contraction_constants,
    fixed_point_bounds,
    predict_asymptotics,
)
from .errors import *  # noqa: F401,F403
from .games import (
    GameConfig,
    best_response_check,
    nash_allocation,
    run_closed_loop,
    verify_budget_conditions,
)
from .generators import complete, erdos_renyi, generate_graph, power_law, star
from .graphs import (
    ProductConversionGraph,
    SocialNetwork,
    build_social_network,
    decompose_conversion_graph,
    dominant_left_eigenvector,
)
from .markov_sim import EmpiricalTrajectory, estimate_trajectories, sample_path
from .ncpm import (
    SELF_SOCIAL,
    SOCIAL_SELF,
    TwoProduct,
    iterate,
    self_social_map,
    social_self_map,
    solve_two_product_fixed_point,
    trajectory,
)

__version__ = "0.1.0"
