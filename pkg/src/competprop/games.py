"""Multi-stage competitive investment games on the social-self model.

Each of the ``R`` companies splits a budget ``c_r`` between seeding
(``x_ir``: a virtual always-``r`` neighbour of node ``i`` with pull
``x_ir / (sum_s x_is + gamma)``) and, in the seeding-quality game, product
quality ``w_r``, which sets a rank-one self-conversion matrix with rows
``w / sum(w)``. A company's stage payoff is the total adoption probability
of its product after one step.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import zeta
from .errors import (
    BudgetConditionError,
    CompetPropError,
    DimensionMismatchError,
    ZeroQualityError,
)
from .graphs import SocialNetwork, as_delta, check_alpha
from .ncpm import check_probability_matrix, snap_unit

SEEDING_QUALITY = "seeding_quality"
SEEDING_ONLY = "seeding_only"
MODES = (SEEDING_QUALITY, SEEDING_ONLY)
BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class Preset:
    """Preset relative quality ``xi`` (on the simplex) with weight ``u``."""

    xi: np.ndarray
    u: float

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        object.__setattr__(self, "xi", xi)
        if self.u <= 0 or np.any(xi <= 0) or abs(xi.sum() - 1.0) > 1e-12:
            raise CompetPropError("preset needs u > 0 and xi > 0 summing to 1")


@dataclass(frozen=True, eq=False)
class GameConfig:
    net: SocialNetwork
    alpha: np.ndarray
    budgets: np.ndarray
    gamma: float
    mode: str = SEEDING_QUALITY
    delta: np.ndarray | None = None
    preset: Preset | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha, self.net.n))
        c = np.asarray(self.budgets, dtype=float)
        object.__setattr__(self, "budgets", c)
        if c.ndim != 1 or c.size < 1 or np.any(c <= 0):
            raise CompetPropError("budgets must be a positive vector")
        if not self.gamma > 0:
            raise CompetPropError("gamma must be positive")
        if self.mode not in MODES:
            raise CompetPropError(f"mode must be one of {MODES}")
        if self.mode == SEEDING_ONLY:
            if self.delta is None:
                raise CompetPropError("seeding-only game needs a product-conversion matrix")
            D = as_delta(self.delta)
            if D.shape[0] != c.size:
                raise DimensionMismatchError(f"delta is {D.shape}, but there are {c.size} companies")
            object.__setattr__(self, "delta", D)
        if self.preset is not None and self.preset.xi.shape != c.shape:
            raise DimensionMismatchError("preset xi must have one entry per company")

    @property
    def n(self) -> int:
        return self.net.n

    @property
    def R(self) -> int:
        return self.budgets.size


@dataclass
class Allocation:
    X: np.ndarray
    w: np.ndarray

    def spent(self) -> np.ndarray:
        return self.X.sum(axis=0) + self.w

    def copy(self) -> "Allocation":
        return Allocation(self.X.copy(), self.w.copy())


def check_allocation(config: GameConfig, alloc: Allocation):
    if alloc.X.shape != (config.n, config.R) or alloc.w.shape != (config.R,):
        raise DimensionMismatchError("allocation shape does not match the game")
    if np.any(alloc.X < 0) or np.any(alloc.w < 0):
        raise CompetPropError("allocations must be nonnegative")
    if np.any(alloc.spent() > config.budgets + BUDGET_TOL):
        raise CompetPropError("allocation exceeds a budget")


@dataclass
class BudgetCheck:
    ok: bool
    thresholds: np.ndarray


def budget_threshold(config: GameConfig) -> float:
    """Budget each company must strictly exceed for an interior equilibrium."""
    a, n, gamma = config.alpha, config.n, config.gamma
    if config.mode == SEEDING_QUALITY:
        return max(n * gamma * (1.0 - a).sum() / a.sum(), (n / a.min() - 1.0) * gamma)
    return (a.sum() / a.min() - 1.0) * gamma


def verify_budget_conditions(config: GameConfig) -> BudgetCheck:
    thr = np.full(config.R, budget_threshold(config))
    return BudgetCheck(bool(np.all(config.budgets > thr)), thr)


def _require_budget(config):
    check = verify_budget_conditions(config)
    if not check.ok:
        raise BudgetConditionError(
            f"budgets {config.budgets.tolist()} do not exceed {check.thresholds[0]:.6g}; "
            "the equilibrium may lie on the boundary"
        )


def neighbor_adoption(config: GameConfig, P) -> np.ndarray:
    """``beta = A_norm P``: neighbourhood-average adoption, one column per company."""
    return config.net.normalized @ P


def nash_seeding_quality(config: GameConfig, P) -> Allocation:
    """Interior stage equilibrium of the seeding-quality game.

    ``x_ir = a_i/n (c_r + gamma 1'beta_r) - gamma beta_ir`` and
    ``w_r = (1 - 1'a/n)(c_r + gamma 1'beta_r)``. With a preset quality
    ``(xi, u)`` the term ``u xi_r`` joins ``c_r + gamma 1'beta_r`` in the
    seeding part and ``(1'a/n) u xi_r`` is taken off the quality part.
    """
    if config.mode != SEEDING_QUALITY:
        raise CompetPropError("config is not a seeding-quality game")
    _require_budget(config)
    P = check_probability_matrix(P, config.n, config.R)
    a, n, gamma, c = config.alpha, config.n, config.gamma, config.budgets
    beta = neighbor_adoption(config, P)
    pull = c + gamma * beta.sum(axis=0)
    share = a.sum() / n
    if config.preset is None:
        X = np.outer(a / n, pull) - gamma * beta
        w = (1.0 - share) * pull
    else:
        extra = config.preset.u * config.preset.xi
        X = np.outer(a / n, pull + extra) - gamma * beta
        w = (1.0 - share) * pull - share * extra
    if np.any(X <= 0) or np.any(w <= 0):
        raise BudgetConditionError("closed-form equilibrium is not interior for this state")
    return Allocation(X, w)


def nash_seeding_only(config: GameConfig, P) -> Allocation:
    """Interior stage equilibrium of the seeding-only game.

    ``x_r = (c_r + gamma 1'beta_r) / (1'a) * a - gamma beta_r``.
    """
    if config.mode != SEEDING_ONLY:
        raise CompetPropError("config is not a seeding-only game")
    _require_budget(config)
    P = check_probability_matrix(P, config.n, config.R)
    a, gamma, c = config.alpha, config.gamma, config.budgets
    beta = neighbor_adoption(config, P)
    X = np.outer(a / a.sum(), c + gamma * beta.sum(axis=0)) - gamma * beta
    if np.any(X <= 0):
        raise BudgetConditionError("closed-form equilibrium is not interior for this state")
    return Allocation(X, np.zeros(config.R))


def nash_allocation(config: GameConfig, P) -> Allocation:
    if config.mode == SEEDING_QUALITY:
        return nash_seeding_quality(config, P)
    return nash_seeding_only(config, P)


def quality_shares(w, preset: Preset | None = None) -> np.ndarray:
    """Rank-one self-conversion row from quality investments."""
    w = np.asarray(w, dtype=float)
    if preset is not None:
        return (w + preset.xi * preset.u) / (w.sum() + preset.u)
    total = w.sum()
    if total <= 0:
        raise ZeroQualityError("total quality investment is zero")
    return np.where(w > 0, w / total, 0.0)


def _virtual_pull(config, P, X):
    """``a_i (gamma beta_ir + x_ir) / (sum_s x_is + gamma)``: social part of the update."""
    beta = neighbor_adoption(config, P)
    denom = X.sum(axis=1, keepdims=True) + config.gamma
    return config.alpha[:, None] * (config.gamma * beta + X) / denom


def game_step_seeding_quality(config: GameConfig, P, alloc: Allocation) -> np.ndarray:
    P = check_probability_matrix(P, config.n, config.R)
    check_allocation(config, alloc)
    g = quality_shares(alloc.w, config.preset)
    return snap_unit(_virtual_pull(config, P, alloc.X) + (1.0 - config.alpha)[:, None] * g[None, :])


def game_step_seeding_only(config: GameConfig, P, alloc: Allocation) -> np.ndarray:
    P = check_probability_matrix(P, config.n, config.R)
    check_allocation(config, alloc)
    self_part = (1.0 - config.alpha)[:, None] * (P @ config.delta)
    return snap_unit(_virtual_pull(config, P, alloc.X) + self_part)


def game_step(config: GameConfig, P, alloc: Allocation) -> np.ndarray:
    if config.mode == SEEDING_QUALITY:
        return game_step_seeding_quality(config, P, alloc)
    return game_step_seeding_only(config, P, alloc)


def seeding_only_nash_update(config: GameConfig, P) -> np.ndarray:
    """Closed-loop update when every company plays the seeding-only equilibrium.

    Written directly in matrix form, without building the allocation.
    """
    P = check_probability_matrix(P, config.n, config.R)
    a, n, gamma, c = config.alpha, config.n, config.gamma, config.budgets
    ones = np.ones((n, 1))
    social = (ones @ c[None, :] + gamma * (ones @ ones.T) @ config.net.normalized @ P) / (c.sum() + n * gamma)
    return snap_unit(a[:, None] * social + (1.0 - a)[:, None] * (P @ config.delta))


def seeding_quality_closed_loop_rate(config: GameConfig) -> float:
    """``n gamma / (1'c + n gamma)``."""
    ng = config.n * config.gamma
    return ng / (config.budgets.sum() + ng)


def seeding_only_rate_bound(config: GameConfig) -> float:
    """Contraction modulus of the seeding-only closed loop in the sup norm."""
    a = config.alpha
    ng = config.n * config.gamma
    return float(np.max(a * ng / (config.budgets.sum() + ng) + (1.0 - a) * zeta(config.delta)))


def payoff(config: GameConfig, P, alloc: Allocation) -> np.ndarray:
    """Stage payoffs ``1' p_r`` after one step, one per company."""
    return game_step(config, P, alloc).sum(axis=0)


# -- numerical equilibrium check --------------------------------------------


@dataclass
class BestResponseReport:
    company: int
    max_gain: float
    trials: int
    ok: bool
    best_deviation: Allocation | None = field(default=None, repr=False)


def _deviation_vectors(config, company, trials, step_sizes, base, rng):
    """Exactly ``trials`` candidate actions for one company, as rows ``[x_1..x_n, w]``.

    Pairwise transfers of ``step * c_r`` between coordinates of the current
    action come first; the rest are Dirichlet-uniform points on the budget
    simplex, one in five of them scaled down to spend less than the budget.
    """
    c = config.budgets[company]
    quality = config.mode == SEEDING_QUALITY
    dim = config.n + 1 if quality else config.n
    base_vec = np.append(base.X[:, company], base.w[company]) if quality else base.X[:, company].copy()
    transfers = []
    for step in step_sizes:
        for i in range(dim):
            amount = min(step * c, base_vec[i])
            if amount <= 0:
                continue
            for j in range(dim):
                if j != i:
                    v = base_vec.copy()
                    v[i] -= amount
                    v[j] += amount
                    transfers.append(v)
    transfers = np.array(transfers).reshape(-1, dim)[:trials]
    n_random = trials - len(transfers)
    pts = rng.dirichlet(np.ones(dim), size=n_random) * c
    pts[::5] *= rng.random((len(pts[::5]), 1))
    return np.vstack([transfers, pts])


def best_response_check(config: GameConfig, P, alloc: Allocation, company: int, trials=10_000,
                        step_sizes=(1e-1, 1e-2, 1e-3, 1e-4), seed=0, tol=1e-9) -> BestResponseReport:
    """Search unilateral deviations of ``company`` for a payoff improvement.

    Requires the budget condition (the interior-equilibrium regime). The
    report's ``ok`` is true when no deviation gains more than ``tol``.
    """
    _require_budget(config)
    check_allocation(config, alloc)
    P = check_probability_matrix(P, config.n, config.R)
    rng = np.random.default_rng(seed)
    cands = _deviation_vectors(config, company, trials, step_sizes, alloc, rng)
    base_payoff = payoff(config, P, alloc)[company]

    # The company's payoff only needs its own column; evaluate all candidates at once.
    a, gamma = config.alpha, config.gamma
    beta = neighbor_adoption(config, P)[:, company]
    others_x = alloc.X.sum(axis=1) - alloc.X[:, company]
    xs = cands[:, : config.n]
    social = (a * (gamma * beta + xs) / (others_x + xs + gamma)).sum(axis=1)
    if config.mode == SEEDING_QUALITY:
        others_w = alloc.w.sum() - alloc.w[company]
        ws = cands[:, config.n]
        if config.preset is None:
            total = others_w + ws
            share = np.divide(ws, total, out=np.zeros_like(ws), where=ws > 0)
        else:
            share = (ws + config.preset.xi[company] * config.preset.u) / (others_w + ws + config.preset.u)
        self_part = (1.0 - a).sum() * share
    else:
        self_part = np.full(len(cands), ((1.0 - a) * (P @ config.delta)[:, company]).sum())
    gains = social + self_part - base_payoff
    best = int(np.argmax(gains))
    max_gain = float(gains[best])
    dev = alloc.copy()
    dev.X[:, company] = xs[best]
    if config.mode == SEEDING_QUALITY:
        dev.w[company] = cands[best, config.n]
    return BestResponseReport(company, max_gain, len(cands), max_gain <= tol, dev)


# -- closed loop ------------------------------------------------------------


def random_allocation(config: GameConfig, company: int, rng) -> tuple[np.ndarray, float]:
    """Spend the whole budget at a Dirichlet-uniform random split."""
    c = config.budgets[company]
    if config.mode == SEEDING_QUALITY:
        v = rng.dirichlet(np.ones(config.n + 1)) * c
        return v[:-1], float(v[-1])
    return rng.dirichlet(np.ones(config.n)) * c, 0.0


@dataclass
class ClosedLoopRun:
    P: np.ndarray
    allocations: list

    @property
    def average_adoption(self) -> np.ndarray:
        """``(T + 1, R)`` population averages ``1' p_r / n``."""
        return self.P.mean(axis=1)

    @property
    def payoffs(self) -> np.ndarray:
        return self.P.sum(axis=1)


def run_closed_loop(config: GameConfig, P0, horizon: int, policies=None, seed=0) -> ClosedLoopRun:
    """Play ``horizon`` stages. ``policies[r]`` is ``"nash"`` or ``"random"``.

    A Nash company plays its component of the stage equilibrium computed
    from the current state, whatever the others do.
    """
    policies = list(policies or ["nash"] * config.R)
    if len(policies) != config.R or any(p not in ("nash", "random") for p in policies):
        raise CompetPropError("policies must list 'nash' or 'random' for every company")
    rng = np.random.default_rng(seed)
    P = check_probability_matrix(P0, config.n, config.R)
    states = [P]
    allocs = []
    for _ in range(horizon):
        if "nash" in policies:
            nash = nash_allocation(config, P)
        alloc = Allocation(np.zeros((config.n, config.R)), np.zeros(config.R))
        for r, pol in enumerate(policies):
            if pol == "nash":
                alloc.X[:, r] = nash.X[:, r]
                alloc.w[r] = nash.w[r]
            else:
                alloc.X[:, r], alloc.w[r] = random_allocation(config, r, rng)
        P = game_step(config, P, alloc)
        states.append(P)
        allocs.append(alloc)
    return ClosedLoopRun(np.array(states), allocs)
