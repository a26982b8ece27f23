"""Random and deterministic social networks for experiments.

All generators return a validated :class:`~competprop.graphs.SocialNetwork`
(connected, simple, undirected) and are reproducible under ``seed``.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CompetPropError, GenerationFailedError
from .graphs import SocialNetwork, build_social_network


def complete(n: int) -> SocialNetwork:
    return build_social_network(np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8))


def star(n: int) -> SocialNetwork:
    """Star with node 0 at the centre."""
    A = np.zeros((n, n), dtype=np.int8)
    A[0, 1:] = A[1:, 0] = 1
    return build_social_network(A)


def _connected(A) -> bool:
    return connected_components(csr_matrix(A), directed=False)[0] == 1


def erdos_renyi(n: int, p: float, seed=None, max_attempts=100) -> SocialNetwork:
    """G(n, p), resampled until connected."""
    if not 0 < p <= 1:
        raise CompetPropError("edge probability must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    for _ in range(max_attempts):
        A = np.zeros((n, n), dtype=np.int8)
        A[iu] = rng.random(len(iu[0])) < p
        A = A + A.T
        if A.sum(axis=1).min() > 0 and _connected(A):
            return build_social_network(A)
    raise GenerationFailedError(f"no connected G({n}, {p}) in {max_attempts} attempts", attempts=max_attempts)


def natural_cutoff(n: int, exponent: float) -> int:
    return max(2, int(np.floor(n ** (1.0 / (exponent - 1.0)))))


def power_law(n: int, exponent: float, seed=None, k_min=2, k_max=None, max_attempts=1000) -> SocialNetwork:
    """Configuration model on a degree sequence with ``P(k) ~ k**-exponent``.

    Degrees are drawn from ``k_min..k_max`` (``k_max`` defaults to the
    natural cutoff ``n**(1/(exponent-1))``). Each attempt draws a fresh
    sequence with even sum and a uniform stub matching; attempts with self
    loops, multi-edges or more than one component are rejected.
    """
    if exponent <= 1:
        raise CompetPropError("power-law exponent must exceed 1")
    k_max = natural_cutoff(n, exponent) if k_max is None else k_max
    k_max = min(k_max, n - 1)
    if not 1 <= k_min <= k_max:
        raise CompetPropError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    rng = np.random.default_rng(seed)
    ks = np.arange(k_min, k_max + 1)
    pk = ks ** -float(exponent)
    pk /= pk.sum()
    for _ in range(max_attempts):
        deg = rng.choice(ks, size=n, p=pk)
        if deg.sum() % 2:
            continue
        stubs = rng.permutation(np.repeat(np.arange(n), deg))
        u, v = stubs[0::2], stubs[1::2]
        if np.any(u == v):
            continue
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        if len(np.unique(lo * n + hi)) < len(lo):
            continue
        A = np.zeros((n, n), dtype=np.int8)
        A[u, v] = A[v, u] = 1
        if _connected(A):
            return build_social_network(A)
    raise GenerationFailedError(
        f"no simple connected power-law graph (n={n}, exponent={exponent}) in {max_attempts} attempts",
        attempts=max_attempts,
    )


def generate_graph(spec: dict, seed=None) -> SocialNetwork:
    """Dispatch on ``spec["kind"]``: complete, star, erdos_renyi, power_law.

    A ``seed`` entry in ``spec`` wins over the ``seed`` argument.
    """
    kind = spec.get("kind")
    seed = spec.get("seed", seed)
    if kind == "complete":
        return complete(int(spec["n"]))
    if kind == "star":
        return star(int(spec["n"]))
    if kind == "erdos_renyi":
        return erdos_renyi(int(spec["n"]), float(spec["p"]), seed=seed)
    if kind == "power_law":
        return power_law(int(spec["n"]), float(spec.get("exponent", 2.87)), seed=seed,
                         k_min=int(spec.get("k_min", 2)),
                         k_max=None if spec.get("k_max") is None else int(spec["k_max"]))
    raise CompetPropError(f"unknown graph kind {kind!r}")
