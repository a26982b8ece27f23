"""Agent-based Monte Carlo simulation of the exact ``R**n``-state chains.

Updates are synchronous: every node reads the states at step ``t`` and
writes step ``t + 1``. Each node consumes three uniforms per step, in a
fixed layout, so one sample path is a deterministic function of its own
random stream. Sample ``k`` of a run seeded with ``seed`` draws from
``numpy.random.default_rng([seed, k])``; chunking and ordering therefore do
not affect the result.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CompetPropError, DimensionMismatchError, InvalidInitialDistributionError
from .graphs import SocialNetwork, as_delta, check_alpha
from .ncpm import MODELS, SELF_SOCIAL, SOCIAL_SELF

UNIFORMS_PER_STEP = 3


def _cumulative(rows: np.ndarray) -> np.ndarray:
    """Row-wise CDFs scaled so the last positive entry is exactly 1."""
    cum = np.cumsum(rows, axis=-1)
    return cum / cum[..., -1:]


def _invert(cum_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """First index whose CDF exceeds ``u``; zero-probability entries are never chosen."""
    return (u[..., None] < cum_rows).argmax(axis=-1)


def _neighbor_states(net: SocialNetwork, states: np.ndarray, u: np.ndarray) -> np.ndarray:
    pick = np.minimum((u * net.degrees).astype(np.int64), net.degrees - 1)
    nb = net.indices[net.indptr[:-1] + pick]
    return np.take_along_axis(states, nb, axis=-1)


def _advance(model, net, alpha, cum, states, u):
    """One synchronous step for a batch ``states`` of shape ``(S, n)``.

    ``u`` has shape ``(S, n, 3)``.
    """
    if model == SOCIAL_SELF:
        social = u[..., 0] < alpha
        copied = _neighbor_states(net, states, u[..., 1])
        converted = _invert(cum[states], u[..., 2])
        return np.where(social, copied, converted)
    if model == SELF_SOCIAL:
        converted = _invert(cum[states], u[..., 0])
        social = (converted == states) & (u[..., 1] < alpha)
        copied = _neighbor_states(net, states, u[..., 2])
        return np.where(social, copied, converted)
    raise CompetPropError(f"unknown model {model!r}; expected one of {MODELS}")


def _check_state(state, n, R):
    s = np.asarray(state)
    if s.shape != (n,) or not np.issubdtype(s.dtype, np.integer):
        raise DimensionMismatchError(f"state must be an integer vector of length {n}")
    if s.min() < 0 or s.max() >= R:
        raise CompetPropError(f"state entries must lie in 0..{R - 1}")
    return s.astype(np.int64)


def _step(model, net, alpha, pcg, state, rng):
    D = as_delta(pcg)
    a = check_alpha(alpha, net.n)
    s = _check_state(state, net.n, D.shape[0])
    u = rng.random((net.n, UNIFORMS_PER_STEP))
    return _advance(model, net, a, _cumulative(D), s[None, :], u[None])[0]


def step_social_self(net, alpha, pcg, state, rng) -> np.ndarray:
    """Social conversion first, then self conversion for nodes that did not copy.

    ``state`` holds 0-indexed product labels; ``rng`` is a numpy Generator.
    """
    return _step(SOCIAL_SELF, net, alpha, pcg, state, rng)


def step_self_social(net, alpha, pcg, state, rng) -> np.ndarray:
    """Self conversion first; nodes that stayed put may then copy a neighbour."""
    return _step(SELF_SOCIAL, net, alpha, pcg, state, rng)


def sample_initial_state(P0, rng) -> np.ndarray:
    """Independent draw of each node's product from its row of ``P0``."""
    P0 = np.asarray(P0, dtype=float)
    return _invert(_cumulative(P0), rng.random(P0.shape[0]))


@dataclass
class EmpiricalTrajectory:
    """Sample frequencies ``counts[t, i, r] / samples``."""

    model: str
    horizon: int
    samples: int
    seed: int
    counts: np.ndarray = field(repr=False)

    @property
    def estimates(self) -> np.ndarray:
        return self.counts / self.samples

    def standard_error(self) -> np.ndarray:
        p = self.estimates
        return np.sqrt(p * (1.0 - p) / self.samples)

    def summary(self) -> dict:
        return {"model": self.model, "seed": self.seed, "samples": self.samples, "horizon": self.horizon}


def _validate_P0(P0, n, R):
    P0 = np.asarray(P0, dtype=float)
    if P0.shape != (n, R):
        raise InvalidInitialDistributionError(f"P0 has shape {P0.shape}, expected ({n}, {R})")
    if np.any(P0 < 0) or np.any(np.abs(P0.sum(axis=1) - 1.0) > 1e-12):
        raise InvalidInitialDistributionError("rows of P0 must be probability distributions")
    return P0


def estimate_trajectories(model, net, alpha, pcg, P0, horizon: int, samples: int, seed: int,
                          chunk_size=512) -> EmpiricalTrajectory:
    """Monte Carlo estimate of ``p_ir(t)`` for ``t = 0..horizon``.

    Every sample draws its initial state from ``P0`` (nodes independent) and
    then runs ``horizon`` synchronous steps. The result depends only on
    ``seed``, never on ``chunk_size``.
    """
    if model not in MODELS:
        raise CompetPropError(f"unknown model {model!r}; expected one of {MODELS}")
    if samples < 1:
        raise CompetPropError("samples must be >= 1")
    if horizon < 0:
        raise CompetPropError("horizon must be >= 0")
    D = as_delta(pcg)
    n, R = net.n, D.shape[0]
    a = check_alpha(alpha, n)
    P0 = _validate_P0(P0, n, R)
    cum_delta = _cumulative(D)
    cum_P0 = _cumulative(P0)
    per_sample = n + horizon * n * UNIFORMS_PER_STEP
    counts = np.zeros((horizon + 1, n, R), dtype=np.int64)
    onehot = np.eye(R, dtype=np.int64)

    for start in range(0, samples, chunk_size):
        stop = min(start + chunk_size, samples)
        u = np.empty((stop - start, per_sample))
        for j, k in enumerate(range(start, stop)):
            u[j] = np.random.default_rng([seed, k]).random(per_sample)
        states = _invert(cum_P0[None, :, :], u[:, :n])
        counts[0] += onehot[states].sum(axis=0)
        steps = u[:, n:].reshape(stop - start, horizon, n, UNIFORMS_PER_STEP)
        for t in range(horizon):
            states = _advance(model, net, a, cum_delta, states, steps[:, t])
            counts[t + 1] += onehot[states].sum(axis=0)

    return EmpiricalTrajectory(model=model, horizon=horizon, samples=samples, seed=seed, counts=counts)


def sample_path(model, net, alpha, pcg, P0, horizon, seed, sample_index=0) -> np.ndarray:
    """Replay one sample of :func:`estimate_trajectories` step by step.

    Returns the ``(horizon + 1, n)`` array of realized states.
    """
    step = {SOCIAL_SELF: step_social_self, SELF_SOCIAL: step_self_social}[model]
    rng = np.random.default_rng([seed, sample_index])
    state = sample_initial_state(_validate_P0(P0, net.n, as_delta(pcg).shape[0]), rng)
    path = [state]
    for _ in range(horizon):
        state = step(net, alpha, pcg, state, rng)
        path.append(state)
    return np.array(path)
