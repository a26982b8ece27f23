"""Long-run behaviour of the mean-field models.

The social-self limit depends on how the product-conversion graph splits
into absorbing SCCs and transient products:

* one SCC: every row converges to the SCC's stationary distribution;
* several SCCs, no transient products: SCC ``l`` keeps the share
  ``w(M)^T P_l(0) 1``, with ``M`` the mixing matrix of the network;
* several SCCs fed by transient products: the shares are found by running
  the model until the transient mass has drained.

For two products under self-social dynamics this module also reports the
fixed-point bounds and the local/global stability conditions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix, diags
from scipy.sparse.linalg import eigsh

from .errors import (
    AssumptionViolatedError,
    NoPositiveColumnError,
    NotConvergedError,
    WrongCaseError,
)
from .graphs import (
    ProductConversionGraph,
    check_alpha,
    decompose_conversion_graph,
    dominant_left_eigenvector,
    mixing_matrix,
)
from .ncpm import TwoProduct, check_probability_matrix, make_social_self_map, t_contraction_factors

TRANSIENT_CUTOFF = 1e-12
HORIZON_CAP = 10**6
DENSE_EIG_LIMIT = 2000


def _as_pcg(pcg) -> ProductConversionGraph:
    return pcg if isinstance(pcg, ProductConversionGraph) else decompose_conversion_graph(pcg)


class ContractionConstants(NamedTuple):
    zeta: float
    epsilon: float


def zeta(delta) -> float:
    """``1 - sum_r min_s delta_sr``: how far the rows of delta are from sharing mass."""
    D = np.asarray(delta, dtype=float)
    return float(1.0 - D.min(axis=0).sum())


def contraction_constants(pcg, alpha) -> ContractionConstants:
    """Per-step contraction rate of the social-self map for a strongly connected delta.

    ``epsilon = a_max + (1 - a_max) * zeta``.
    """
    g = _as_pcg(pcg)
    if g.case != 1:
        raise WrongCaseError(f"contraction constants need a strongly connected delta, got {g.case_label}")
    if not np.any(np.all(g.delta > 0, axis=0)):
        raise NoPositiveColumnError("delta has no strictly positive column")
    a_max = float(np.max(alpha))
    z = zeta(g.delta)
    return ContractionConstants(z, a_max + (1.0 - a_max) * z)


def limit_assumptions(pcg) -> list[str]:
    """Names of the violated preconditions of the asymptotic prediction (empty if none)."""
    g = _as_pcg(pcg)
    failed = []
    for l, (idx, blk, d) in enumerate(zip(g.sccs, g.blocks, g.periods), start=1):
        if d != 1:
            failed.append(f"absorbing SCC {l} {idx.tolist()} is periodic (period {d})")
        if not np.any(np.all(blk > 0, axis=0)):
            failed.append(f"absorbing SCC {l} {idx.tolist()} has no strictly positive column")
    if g.k0:
        leak = g.delta0.sum(axis=1)
        if np.any(leak >= 1.0):
            bad = g.transient[leak >= 1.0].tolist()
            failed.append(f"transient products {bad} do not leak directly into an absorbing SCC")
    return failed


@dataclass
class AsymptoticPrediction:
    case_label: str
    limit: np.ndarray
    rate: float | None = None
    gammas: np.ndarray | None = None
    gamma_provenance: str | None = None
    steps: int | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "case": self.case_label,
            "limit": self.limit.tolist(),
            "rate": self.rate,
            "gammas": None if self.gammas is None else self.gammas.tolist(),
            "gamma_provenance": self.gamma_provenance,
        }


def predict_asymptotics(net, alpha, pcg, P0, cutoff=TRANSIENT_CUTOFF, horizon_cap=HORIZON_CAP) -> AsymptoticPrediction:
    """Limit of the social-self model started from ``P0``.

    The SCC shares are closed-form when there are no transient products;
    otherwise they are read off a run of the model once the transient mass
    drops below ``cutoff`` (provenance ``"simulated"``).

    Raises
    ------
    AssumptionViolatedError
        Periodic SCC, SCC without a positive column, or a transient product
        with no direct leak.
    NotConvergedError
        Transient mass still above ``cutoff`` after ``horizon_cap`` steps.
    """
    g = _as_pcg(pcg)
    a = check_alpha(alpha, net.n)
    P0 = check_probability_matrix(P0, net.n, g.R)
    failed = limit_assumptions(g)
    if failed:
        raise AssumptionViolatedError(failed)

    n, R = net.n, g.R
    stationary = [dominant_left_eigenvector(blk) for blk in g.blocks]

    def assemble(gammas):
        row = np.zeros(R)
        for idx, w, gam in zip(g.sccs, stationary, gammas):
            row[idx] = gam * w
        return np.tile(row, (n, 1))

    if g.case in (1, 2):
        rate = contraction_constants(g, a).epsilon if g.case == 1 else None
        return AsymptoticPrediction(g.case_label, assemble([1.0]), rate=rate)

    wM = dominant_left_eigenvector(mixing_matrix(net, a))
    if g.case == 3:
        gammas = np.array([wM @ P0[:, idx].sum(axis=1) for idx in g.sccs])
        return AsymptoticPrediction(g.case_label, assemble(gammas), gammas=gammas, gamma_provenance="closed_form")

    f = make_social_self_map(net, a, g)
    P = P0
    steps = 0
    while P[:, g.transient].sum(axis=1).max() >= cutoff:
        if steps >= horizon_cap:
            raise NotConvergedError(
                f"transient mass above {cutoff:g} after {horizon_cap} steps",
                last=P, residual=float(P[:, g.transient].sum(axis=1).max()), iterations=steps,
            )
        P = f(P)
        steps += 1
    # after the cutoff the SCC masses follow x <- M x, whose consensus value is w(M)^T x
    gammas = np.array([wM @ P[:, idx].sum(axis=1) for idx in g.sccs])
    return AsymptoticPrediction(g.case_label, assemble(gammas), gammas=gammas,
                                gamma_provenance="simulated", steps=steps)


# -- two-product self-social ------------------------------------------------


@dataclass
class FixedPointBounds:
    lower: float
    upper: float
    node_gap_bound: np.ndarray

    @property
    def interval(self):
        return (self.lower, self.upper)


def fixed_point_bounds(params: TwoProduct, alpha) -> FixedPointBounds:
    """Interval containing every entry of the fixed point, and per-node gap bounds.

    The fixed point lies in ``[1/2, delta12 / (delta12 + delta21)]`` and
    ``p_i - (A p)_i <= (1 - a_i/2)/a_i * (d22 - d11)/(d22 + d11)``.
    """
    params.require_order()
    a = np.asarray(alpha, dtype=float)
    upper = params.delta12 / (params.delta12 + params.delta21)
    gap = (1.0 - 0.5 * a) / a * (params.delta22 - params.delta11) / (params.delta22 + params.delta11)
    return FixedPointBounds(0.5, upper, gap)


def local_stability_threshold(params: TwoProduct) -> float:
    d11, d22 = params.delta11, params.delta22
    return 8 * d11 * d22 / ((d22 - d11) ** 2 + 8 * d11 * d22)


def global_stability_threshold(params: TwoProduct) -> float:
    d11, d22 = params.delta11, params.delta22
    return (d22 + d11) / (3 * d22 - d11)


def two_product_jacobian(params: TwoProduct, net, alpha, p_star) -> np.ndarray:
    """Jacobian of the two-product self-social map ``h`` at ``p_star``."""
    a = np.asarray(alpha, dtype=float)
    p = np.asarray(p_star, dtype=float)
    An = net.normalized
    d11, d22, d12, d21 = params.delta11, params.delta22, params.delta12, params.delta21
    diag = 1.0 - d12 - d21 - d22 * a + (d22 - d11) * a * (An @ p)
    off = (a * (d11 + (d22 - d11) * p))[:, None] * An
    return off + np.diag(diag)


def _symmetric_form(params, net, alpha, p_star):
    """Symmetric matrix similar to the Jacobian (sparse).

    The off-diagonal part is ``diag(d) A`` with ``A`` symmetric and ``d > 0``,
    so ``diag(d)^(1/2) A diag(d)^(1/2) + diag`` has the same spectrum.
    """
    a = np.asarray(alpha, dtype=float)
    p = np.asarray(p_star, dtype=float)
    d11, d22, d12, d21 = params.delta11, params.delta22, params.delta12, params.delta21
    scale = a * (d11 + (d22 - d11) * p) / net.degrees
    diag = 1.0 - d12 - d21 - d22 * a + (d22 - d11) * a * (net.normalized @ p)
    s = np.sqrt(scale)
    A = csr_matrix(net.adjacency.astype(float))
    return diags(s) @ A @ diags(s) + diags(diag)


@dataclass
class StabilityReport:
    local_threshold: float
    global_threshold: float
    local_sufficient: np.ndarray
    global_sufficient: np.ndarray
    spectral_radius: float
    max_imag: float
    rate_bound: float
    h_lipschitz_bound: float

    def to_dict(self) -> dict:
        return {
            "local": self.local_sufficient.tolist(),
            "global": self.global_sufficient.tolist(),
            "local_threshold": self.local_threshold,
            "global_threshold": self.global_threshold,
            "rho": self.spectral_radius,
            "max_imag": self.max_imag,
            "rate_bound": self.rate_bound,
            "h_lipschitz_bound": self.h_lipschitz_bound,
        }


def check_stability(net, alpha, params: TwoProduct, p_star) -> StabilityReport:
    """Evaluate the stability conditions at a solved two-product fixed point.

    ``rate_bound`` is ``max_i max(eps_i, K_i eps_i + K_i - 1)``. For nodes
    with ``K_i < 1`` the sup-norm Lipschitz constant of ``h`` is
    ``K_i eps_i + 1 - K_i`` instead; ``h_lipschitz_bound`` takes
    ``K_i eps_i + |1 - K_i|`` per node, which covers both cases.
    """
    a = check_alpha(alpha, net.n)
    local_thr = local_stability_threshold(params)
    global_thr = global_stability_threshold(params)
    if net.n <= DENSE_EIG_LIMIT:
        eig = np.linalg.eigvals(two_product_jacobian(params, net, a, p_star))
        rho = float(np.max(np.abs(eig)))
        max_imag = float(np.max(np.abs(eig.imag)))
    else:
        S = _symmetric_form(params, net, a, p_star)
        hi = eigsh(S, k=1, which="LA", return_eigenvectors=False)[0]
        lo = eigsh(S, k=1, which="SA", return_eigenvectors=False)[0]
        rho = float(max(abs(hi), abs(lo)))
        max_imag = 0.0
    K = params.k_diag(a)
    eps = t_contraction_factors(params, a)
    rate_bound = float(np.max(np.maximum(eps, K * eps + K - 1.0)))
    lip = float(np.max(K * eps + np.abs(1.0 - K)))
    return StabilityReport(
        local_threshold=local_thr,
        global_threshold=global_thr,
        local_sufficient=a < local_thr,
        global_sufficient=a < global_thr,
        spectral_radius=rho,
        max_imag=max_imag,
        rate_bound=rate_bound,
        h_lipschitz_bound=lip,
    )
