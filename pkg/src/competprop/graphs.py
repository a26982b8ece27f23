"""The two graphs of the model.

The social network is an undirected, unweighted, connected graph; only its
row-normalized adjacency matrix enters the dynamics. The product-conversion
graph is a row-stochastic matrix over products whose absorbing strongly
connected components drive the long-run behaviour.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import reduce
from math import gcd

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import (
    CompetPropError,
    DimensionMismatchError,
    DisconnectedError,
    IsolatedNodeError,
    NegativeEntryError,
    NotConvergedError,
    NotRowStochasticError,
    NotSymmetricError,
    PeriodicOrReducibleError,
    SelfLoopError,
)

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SocialNetwork:
    """Undirected connected graph with its row-normalized adjacency.

    Attributes
    ----------
    adjacency : (n, n) ndarray of int8
        Symmetric 0/1 matrix with zero diagonal.
    normalized : (n, n) ndarray
        ``adjacency[i, j] / degree[i]``.
    degrees : (n,) ndarray of int
    indptr, indices : ndarray
        CSR neighbour lists, used by the samplers.
    """

    adjacency: np.ndarray
    normalized: np.ndarray
    degrees: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(iu.tolist(), ju.tolist()))


def build_social_network(adjacency) -> SocialNetwork:
    """Validate a 0/1 adjacency matrix and normalize its rows.

    Raises
    ------
    NotSymmetricError, SelfLoopError, IsolatedNodeError, DisconnectedError
        Each names the violated modelling assumption.
    """
    A = np.asarray(adjacency)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"adjacency must be square, got shape {A.shape}")
    if A.shape[0] == 0:
        raise DimensionMismatchError("adjacency is empty")
    if not np.all((A == 0) | (A == 1)):
        raise CompetPropError("adjacency entries must be 0 or 1 (unweighted network)")
    A = A.astype(np.int8)
    if not np.array_equal(A, A.T):
        raise NotSymmetricError("adjacency is not symmetric; the social network must be undirected")
    if np.any(np.diag(A)):
        raise SelfLoopError("adjacency has nonzero diagonal; self loops are not allowed")
    deg = A.sum(axis=1).astype(np.int64)
    if np.any(deg == 0):
        isolated = np.flatnonzero(deg == 0).tolist()
        raise IsolatedNodeError(f"nodes {isolated} have no neighbours")
    sp = csr_matrix(A)
    ncomp, _ = connected_components(sp, directed=False)
    if ncomp != 1:
        raise DisconnectedError(f"social network has {ncomp} connected components; it must be connected")
    normalized = A / deg[:, None]
    sp.sort_indices()
    return SocialNetwork(
        adjacency=A,
        normalized=normalized,
        degrees=deg,
        indptr=sp.indptr.astype(np.int64),
        indices=sp.indices.astype(np.int64),
    )


def network_from_edges(edges, n=None) -> SocialNetwork:
    """Build a network from 0-indexed undirected edges ``(i, j)``."""
    edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(edges.max()) + 1 if edges.size else 0
    A = np.zeros((n, n), dtype=np.int8)
    A[edges[:, 0], edges[:, 1]] = 1
    A[edges[:, 1], edges[:, 0]] = 1
    return build_social_network(A)


def check_alpha(alpha, n: int) -> np.ndarray:
    """Return the open-mindedness vector as floats, checking 0 < alpha_i < 1."""
    a = np.asarray(alpha, dtype=float)
    if a.shape != (n,):
        raise DimensionMismatchError(f"alpha has shape {a.shape}, expected ({n},)")
    if not np.all((a > 0) & (a < 1)):
        raise CompetPropError("open-mindedness must satisfy 0 < alpha_i < 1")
    return a


def check_row_stochastic(M, name="matrix") -> np.ndarray:
    """Validate a nonnegative square matrix whose rows sum to one.

    Rows off by at most ``ROW_SUM_TOL`` are renormalized.
    """
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatchError(f"{name} must be a nonempty square matrix, got shape {M.shape}")
    if np.any(M < 0):
        raise NegativeEntryError(f"{name} has negative entries")
    sums = M.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
        bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL).tolist()
        raise NotRowStochasticError(f"{name} rows {bad} do not sum to 1")
    return M / sums[:, None]


def _period(pattern: csr_matrix, nodes: np.ndarray) -> int:
    """Period of the irreducible subgraph induced on ``nodes``.

    gcd over internal edges u->v of level(u) + 1 - level(v), with levels from
    a breadth-first layering.
    """
    sub = pattern[nodes][:, nodes].tocsr()
    order, pred = breadth_first_order(sub, 0, directed=True, return_predecessors=True)
    level = np.full(len(nodes), -1, dtype=np.int64)
    level[0] = 0
    for v in order[1:]:
        level[v] = level[pred[v]] + 1
    coo = sub.tocoo()
    diffs = np.abs(level[coo.row] + 1 - level[coo.col])
    return reduce(gcd, diffs.tolist(), 0)


def strongly_connected_components(M) -> list[np.ndarray]:
    """SCCs of the directed graph with an edge r->s wherever ``M[r, s] > 0``."""
    pattern = csr_matrix(np.asarray(M) > 0)
    ncomp, labels = connected_components(pattern, directed=True, connection="strong")
    comps = [np.flatnonzero(labels == c) for c in range(ncomp)]
    comps.sort(key=lambda c: c[0])
    return comps


@dataclass(frozen=True, eq=False)
class ProductConversionGraph:
    """A product-conversion matrix together with its SCC structure.

    ``sccs`` lists the absorbing SCCs in order of their smallest product
    index; ``transient`` holds every other product. ``order`` is the
    re-indexing that puts the matrix in block form (absorbing SCCs first,
    transient products last), and ``blocks``/``delta0``/``inflow`` are the
    diagonal blocks, the transient block and the transient-to-SCC blocks in
    that order.
    """

    delta: np.ndarray
    sccs: tuple
    transient: np.ndarray
    periods: tuple
    blocks: tuple = field(repr=False)
    delta0: np.ndarray = field(repr=False)
    inflow: tuple = field(repr=False)

    @property
    def R(self) -> int:
        return self.delta.shape[0]

    @property
    def m(self) -> int:
        return len(self.sccs)

    @property
    def k0(self) -> int:
        return len(self.transient)

    @property
    def case(self) -> int:
        if self.m == 1:
            return 1 if self.k0 == 0 else 2
        return 3 if self.k0 == 0 else 4

    @property
    def case_label(self) -> str:
        return f"Case{self.case}"

    @property
    def order(self) -> np.ndarray:
        return np.concatenate(list(self.sccs) + [self.transient]).astype(np.int64)

    def reassemble(self) -> np.ndarray:
        """Rebuild the original matrix from its blocks."""
        R = self.R
        out = np.zeros((R, R))
        for idx, blk in zip(self.sccs, self.blocks):
            out[np.ix_(idx, idx)] = blk
        if self.k0:
            out[np.ix_(self.transient, self.transient)] = self.delta0
            for idx, B in zip(self.sccs, self.inflow):
                out[np.ix_(self.transient, idx)] = B
        return out


def decompose_conversion_graph(delta) -> ProductConversionGraph:
    """Split a product-conversion matrix into absorbing SCCs and transient products.

    An SCC is absorbing when none of its states put mass outside it. Absorbing
    SCCs that are periodic trigger a warning here; the asymptotic predictor
    refuses them outright.
    """
    D = check_row_stochastic(delta, "delta")
    pattern = csr_matrix(D > 0)
    sccs, periods = [], []
    for comp in strongly_connected_components(D):
        outside = np.setdiff1d(np.arange(D.shape[0]), comp)
        if D[np.ix_(comp, outside)].sum() == 0:
            sccs.append(comp)
            periods.append(_period(pattern, comp))
    absorbed = np.concatenate(sccs)
    transient = np.setdiff1d(np.arange(D.shape[0]), absorbed)
    for comp, d in zip(sccs, periods):
        if d != 1:
            warnings.warn(
                f"absorbing SCC {comp.tolist()} is periodic (period {d})", RuntimeWarning, stacklevel=2
            )
    blocks = tuple(D[np.ix_(c, c)] for c in sccs)
    delta0 = D[np.ix_(transient, transient)]
    inflow = tuple(D[np.ix_(transient, c)] for c in sccs)
    return ProductConversionGraph(
        delta=D,
        sccs=tuple(sccs),
        transient=transient,
        periods=tuple(periods),
        blocks=blocks,
        delta0=delta0,
        inflow=inflow,
    )


def as_delta(pcg) -> np.ndarray:
    """Accept either a ProductConversionGraph or a raw matrix."""
    if isinstance(pcg, ProductConversionGraph):
        return pcg.delta
    return check_row_stochastic(pcg, "delta")


def is_primitive(M) -> bool:
    """Irreducible and aperiodic, from the sparsity pattern alone."""
    comps = strongly_connected_components(M)
    if len(comps) != 1:
        return False
    return _period(csr_matrix(np.asarray(M) > 0), comps[0]) == 1


def dominant_left_eigenvector(M, tol=1e-12, max_iter=10**6) -> np.ndarray:
    """Stationary distribution of a primitive row-stochastic matrix.

    Power iteration ``w <- w M`` from the uniform vector, stopped once
    ``||w M - w||_1 <= tol``.

    Raises
    ------
    PeriodicOrReducibleError
        If ``M`` is not irreducible and aperiodic.
    NotConvergedError
        If the residual is still above ``tol`` after ``max_iter`` steps.
    """
    M = check_row_stochastic(M, "M")
    if not is_primitive(M):
        raise PeriodicOrReducibleError("matrix is reducible or periodic; dominant left eigenvector is not unique")
    n = M.shape[0]
    w = np.full(n, 1.0 / n)
    res = np.inf
    for _ in range(max_iter):
        nxt = w @ M
        res = np.abs(nxt - w).sum()
        if res <= tol:
            return w
        w = nxt / nxt.sum()
    raise NotConvergedError(
        f"power iteration did not reach tol={tol} in {max_iter} steps (residual {res:.3g})",
        last=w,
        residual=res,
        iterations=max_iter,
    )


def mixing_matrix(net: SocialNetwork, alpha) -> np.ndarray:
    """``diag(alpha) A_norm + I - diag(alpha)``: the consensus dynamics of SCC mass."""
    a = check_alpha(alpha, net.n)
    return a[:, None] * net.normalized + np.diag(1.0 - a)
