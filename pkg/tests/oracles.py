"""Reference computations used only by the tests.

They share no code with the package: the exact chain is built by listing
all ``R**n`` joint states, SCCs come from a boolean transitive closure, and
stationary vectors from a linear solve.
"""
import itertools

import numpy as np


def node_transition(model, A, alpha, delta, state, i):
    """Distribution of node ``i``'s next product given the joint ``state``."""
    R = delta.shape[0]
    nbrs = np.flatnonzero(A[i])
    frac = np.bincount(np.asarray(state)[nbrs], minlength=R) / len(nbrs)
    s = state[i]
    if model == "social_self":
        return alpha[i] * frac + (1 - alpha[i]) * delta[s]
    # self conversion first; only a node that kept its product listens to a neighbour
    out = delta[s].copy()
    out[s] -= delta[s, s] * alpha[i]
    out += delta[s, s] * alpha[i] * frac
    return out


def exact_marginals(model, A, alpha, delta, P0, horizon):
    """``(horizon+1, n, R)`` marginals of the exact chain from a product-form start."""
    A = np.asarray(A)
    delta = np.asarray(delta, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    n, R = np.asarray(P0).shape
    states = list(itertools.product(range(R), repeat=n))
    index = {s: k for k, s in enumerate(states)}
    S = len(states)
    T = np.zeros((S, S))
    for s in states:
        rows = [node_transition(model, A, alpha, delta, np.array(s), i) for i in range(n)]
        for s2 in states:
            T[index[s], index[s2]] = np.prod([rows[i][s2[i]] for i in range(n)])
    dist = np.array([np.prod([P0[i][s[i]] for i in range(n)]) for s in states])
    onehot = np.zeros((S, n, R))
    for s in states:
        for i in range(n):
            onehot[index[s], i, s[i]] = 1.0
    out = [np.einsum("k,kir->ir", dist, onehot)]
    for _ in range(horizon):
        dist = dist @ T
        out.append(np.einsum("k,kir->ir", dist, onehot))
    return np.array(out)


def closure_sccs(delta):
    """SCCs by transitive closure (Warshall), sorted by smallest member."""
    R = len(delta)
    reach = (np.asarray(delta) > 0) | np.eye(R, dtype=bool)
    for k in range(R):
        reach |= reach[:, [k]] & reach[[k], :]
    mutual = reach & reach.T
    seen, comps = set(), []
    for r in range(R):
        if r not in seen:
            comp = sorted(np.flatnonzero(mutual[r]).tolist())
            seen.update(comp)
            comps.append(comp)
    return comps, reach


def absorbing_sccs(delta):
    comps, reach = closure_sccs(delta)
    out = []
    for c in comps:
        # absorbing: nothing reachable outside the component
        if set(np.flatnonzero(reach[c[0]]).tolist()) == set(c):
            out.append(c)
    return out


def stationary_solve(M):
    """Left eigenvector for eigenvalue 1 via ``w (M - I) = 0``, ``sum w = 1``."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    lhs = np.vstack([(M - np.eye(n)).T, np.ones((1, n))])
    rhs = np.append(np.zeros(n), 1.0)
    return np.linalg.lstsq(lhs, rhs, rcond=None)[0]


def bisect_symmetric_fixed_point(d11, d22, a, lo=0.0, hi=1.0, tol=1e-13):
    """Scalar fixed point ``q`` of the two-product map on a 2-node complete graph.

    With ``x = (q, q)`` the neighbour average is ``q``, so ``h`` collapses to
    ``g(q) = d12 + (1 - d12 - d21) q + d11 a q - d22 a q + (d22 - d11) a q^2``.
    """
    d12, d21 = 1 - d11, 1 - d22

    def F(q):
        return d12 + (1 - d12 - d21) * q + d11 * a * q - d22 * a * q + (d22 - d11) * a * q * q - q

    flo = F(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = F(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
