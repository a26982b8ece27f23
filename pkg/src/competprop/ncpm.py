"""Mean-field network competitive propagation models.

Two difference-equation systems approximate the Markov chains of
:mod:`competprop.markov_sim`:

* social-self: ``P <- diag(a) A P + (I - diag(a)) P D``
* self-social: ``P <- P D + diag(a) diag(P d) A P - diag(a) P diag(d)``
  with ``d`` the diagonal of ``D``.

For two products the self-social system reduces to a map ``h`` on the
probability of adopting product 2; its fixed points coincide with those of
the contraction ``T`` used by :func:`solve_two_product_fixed_point`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CompetPropError,
    DimensionMismatchError,
    InvariantViolationError,
    NotConvergedError,
    ParameterOrderError,
)
from .graphs import SocialNetwork, as_delta, check_alpha

SNAP_TOL = 1e-15
ROW_TOL = 1e-12

SOCIAL_SELF = "social_self"
SELF_SOCIAL = "self_social"
MODELS = (SOCIAL_SELF, SELF_SOCIAL)


def snap_unit(X, tol=SNAP_TOL):
    """Clip rounding drift into [0, 1]; anything further out is a bug."""
    X = np.asarray(X, dtype=float)
    if X.size and (X.min() < -tol or X.max() > 1.0 + tol):
        raise InvariantViolationError(
            f"values left [0, 1] by more than {tol:g}: min {X.min():.3g}, max {X.max():.3g}"
        )
    return np.clip(X, 0.0, 1.0)


def check_probability_matrix(P, n=None, R=None, tol=ROW_TOL) -> np.ndarray:
    """Validate an ``n x R`` matrix with rows on the probability simplex."""
    P = np.array(P, dtype=float)
    if P.ndim != 2:
        raise DimensionMismatchError(f"probability matrix must be 2-d, got shape {P.shape}")
    if (n is not None and P.shape[0] != n) or (R is not None and P.shape[1] != R):
        raise DimensionMismatchError(f"probability matrix has shape {P.shape}, expected ({n}, {R})")
    P = snap_unit(P)
    if np.any(np.abs(P.sum(axis=1) - 1.0) > tol):
        raise CompetPropError("probability matrix rows must sum to 1")
    return P


def _network_and_alpha(net: SocialNetwork, alpha):
    return net.normalized, check_alpha(alpha, net.n)


def make_social_self_map(net, alpha, pcg):
    """Validate once and return ``f`` as a closure over the model data."""
    An, a = _network_and_alpha(net, alpha)
    D = as_delta(pcg)
    a_col = a[:, None]
    b_col = 1.0 - a_col

    def f(P):
        if P.shape != (An.shape[0], D.shape[0]):
            raise DimensionMismatchError(f"P has shape {P.shape}, expected {(An.shape[0], D.shape[0])}")
        return snap_unit(a_col * (An @ P) + b_col * (P @ D))

    return f


def make_self_social_map(net, alpha, pcg):
    An, a = _network_and_alpha(net, alpha)
    D = as_delta(pcg)
    d = np.diag(D).copy()
    a_col = a[:, None]

    def g(P):
        if P.shape != (An.shape[0], D.shape[0]):
            raise DimensionMismatchError(f"P has shape {P.shape}, expected {(An.shape[0], D.shape[0])}")
        stay = (P @ d)[:, None]
        return snap_unit(P @ D + a_col * stay * (An @ P) - a_col * P * d)

    return g


def make_map(model, net, alpha, pcg):
    if model == SOCIAL_SELF:
        return make_social_self_map(net, alpha, pcg)
    if model == SELF_SOCIAL:
        return make_self_social_map(net, alpha, pcg)
    raise CompetPropError(f"unknown model {model!r}; expected one of {MODELS}")


def social_self_map(net, alpha, pcg, P) -> np.ndarray:
    P = check_probability_matrix(P, net.n, as_delta(pcg).shape[0])
    return make_social_self_map(net, alpha, pcg)(P)


def self_social_map(net, alpha, pcg, P) -> np.ndarray:
    P = check_probability_matrix(P, net.n, as_delta(pcg).shape[0])
    return make_self_social_map(net, alpha, pcg)(P)


def trajectory(model, net, alpha, pcg, P0, horizon: int) -> np.ndarray:
    """``(horizon + 1, n, R)`` array of NCPM iterates starting at ``P0``."""
    step = make_map(model, net, alpha, pcg)
    P = check_probability_matrix(P0, net.n, as_delta(pcg).shape[0])
    out = np.empty((horizon + 1,) + P.shape)
    out[0] = P
    for t in range(horizon):
        P = step(P)
        out[t + 1] = P
    return out


# -- two products -----------------------------------------------------------


@dataclass(frozen=True)
class TwoProduct:
    """Self-conversion parameters of a two-product system.

    Only the diagonal is free: ``delta12 = 1 - delta11`` and
    ``delta21 = 1 - delta22``. Product 2 is the favoured one when
    ``delta22 >= delta11``.
    """

    delta11: float
    delta22: float

    def __post_init__(self):
        for name in ("delta11", "delta22"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise CompetPropError(f"{name}={v} outside [0, 1]")

    @classmethod
    def from_matrix(cls, delta):
        D = as_delta(delta)
        if D.shape != (2, 2):
            raise DimensionMismatchError(f"two-product delta must be 2x2, got {D.shape}")
        return cls(float(D[0, 0]), float(D[1, 1]))

    @property
    def delta12(self) -> float:
        return 1.0 - self.delta11

    @property
    def delta21(self) -> float:
        return 1.0 - self.delta22

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.delta11, self.delta12], [self.delta21, self.delta22]])

    def k_diag(self, alpha) -> np.ndarray:
        """Diagonal of ``K = (delta12 + delta21) I + delta22 diag(alpha)``."""
        return self.delta12 + self.delta21 + self.delta22 * np.asarray(alpha, dtype=float)

    def require_order(self):
        if self.delta22 < self.delta11:
            raise ParameterOrderError(
                f"delta22={self.delta22} < delta11={self.delta11}; swap the product labels"
            )


def _check_unit_vector(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatchError(f"state has shape {x.shape}, expected ({n},)")
    return snap_unit(x)


def make_two_product_h(params: TwoProduct, net, alpha):
    An, a = _network_and_alpha(net, alpha)
    d11, d22, d12, d21 = params.delta11, params.delta22, params.delta12, params.delta21

    def h(x):
        ax = An @ x
        return snap_unit(d12 + (1.0 - d12 - d21) * x + d11 * a * ax - d22 * a * x + (d22 - d11) * a * x * ax)

    return h


def make_two_product_T(params: TwoProduct, net, alpha):
    An, a = _network_and_alpha(net, alpha)
    d11, d22, d12 = params.delta11, params.delta22, params.delta12
    K = params.k_diag(a)

    def T(x):
        ax = An @ x
        return snap_unit((d12 + d11 * a * ax + (d22 - d11) * a * x * ax) / K)

    return T


def two_product_h(x, params: TwoProduct, net, alpha) -> np.ndarray:
    """Two-product self-social update of the product-2 probabilities."""
    return make_two_product_h(params, net, alpha)(_check_unit_vector(x, net.n))


def two_product_T(x, params: TwoProduct, net, alpha) -> np.ndarray:
    """The rescaled fixed-point map ``T`` whose fixed points are those of ``h``."""
    return make_two_product_T(params, net, alpha)(_check_unit_vector(x, net.n))


def t_contraction_factors(params: TwoProduct, alpha) -> np.ndarray:
    """Per-node Lipschitz constants ``(2 d22 - d11) a_i / K_i`` of ``T`` in the sup norm."""
    a = np.asarray(alpha, dtype=float)
    return (2.0 * params.delta22 - params.delta11) * a / params.k_diag(a)


# -- fixed-point iteration --------------------------------------------------


@dataclass
class IterationResult:
    last: np.ndarray
    iterations: int
    residual: float
    converged: bool
    residuals: np.ndarray = field(repr=False)
    trajectory: list | None = field(default=None, repr=False)

    @property
    def fixed_point(self):
        return self.last if self.converged else None

    @property
    def rate_estimate(self) -> float:
        """Geometric mean of the last few successive-residual ratios.

        Ratios are taken only while residuals sit well above rounding noise.
        """
        r = self.residuals[self.residuals > 1e-13]
        if len(r) < 2:
            return float("nan")
        ratios = r[1:] / r[:-1]
        tail = ratios[-10:]
        return float(np.exp(np.mean(np.log(tail))))

    def report(self) -> dict:
        return {
            "fixed_point": self.last.tolist() if self.converged else None,
            "last": self.last.tolist(),
            "residual": float(self.residual),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "rate_estimate": self.rate_estimate,
        }


def iterate(step, initial, tol=1e-10, max_iter=10**6, keep_trajectory=False, strict=None) -> IterationResult:
    """Picard iteration ``x <- step(x)`` until ``||x_{k+1} - x_k||_inf <= tol``.

    Parameters
    ----------
    step : callable
        The map to iterate (e.g. from :func:`make_map`).
    initial : ndarray
        Starting point; must lie in the map's domain.
    keep_trajectory : bool
        Record every iterate.
    strict : bool, optional
        Raise :class:`NotConvergedError` when ``max_iter`` is reached.
        Defaults to ``not keep_trajectory``.
    """
    if strict is None:
        strict = not keep_trajectory
    x = np.array(initial, dtype=float)
    traj = [x.copy()] if keep_trajectory else None
    residuals = []
    res = np.inf
    k = 0
    converged = False
    while k < max_iter:
        nxt = step(x)
        res = float(np.max(np.abs(nxt - x))) if x.size else 0.0
        residuals.append(res)
        x = nxt
        k += 1
        if keep_trajectory:
            traj.append(x.copy())
        if res <= tol:
            converged = True
            break
    result = IterationResult(x, k, res, converged, np.asarray(residuals), traj)
    if strict and not converged:
        raise NotConvergedError(
            f"no convergence to tol={tol:g} in {max_iter} iterations (residual {res:.3g})",
            last=x,
            residual=res,
            iterations=k,
        )
    return result


def solve_two_product_fixed_point(params: TwoProduct, net, alpha, tol=1e-10, max_iter=10**6, x0=None,
                                  full_output=False):
    """Unique fixed point of the two-product self-social model.

    Iterates the contraction ``T`` (from ``x0``, default ``1/2``) and then
    checks the same point against ``h``.

    Returns
    -------
    p : (n,) ndarray
        Fixed-point probabilities of adopting product 2.
    info : IterationResult
        Only when ``full_output`` is true.

    Raises
    ------
    ParameterOrderError
        If ``delta22 < delta11``.
    """
    params.require_order()
    if not (0.0 < params.delta11 < 1.0 and 0.0 < params.delta22 < 1.0):
        raise CompetPropError("self-conversion probabilities must lie strictly inside (0, 1)")
    T = make_two_product_T(params, net, alpha)
    h = make_two_product_h(params, net, alpha)
    start = np.full(net.n, 0.5) if x0 is None else _check_unit_vector(x0, net.n)
    info = iterate(T, start, tol=tol, max_iter=max_iter)
    p = info.last
    if np.max(np.abs(h(p) - p)) > 10 * tol:
        raise InvariantViolationError("T fixed point is not a fixed point of h")
    return (p, info) if full_output else p
