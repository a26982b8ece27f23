import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from competprop.analysis import contraction_constants
from competprop.errors import (
    DimensionMismatchError,
    InvariantViolationError,
    NotConvergedError,
    ParameterOrderError,
)
from competprop.generators import complete, erdos_renyi
from competprop.graphs import build_social_network
from competprop.ncpm import (
    SELF_SOCIAL,
    SOCIAL_SELF,
    TwoProduct,
    iterate,
    make_social_self_map,
    make_two_product_T,
    self_social_map,
    snap_unit,
    social_self_map,
    solve_two_product_fixed_point,
    t_contraction_factors,
    trajectory,
    two_product_h,
    two_product_T,
)
from conftest import DELTA_STRONG
from oracles import bisect_symmetric_fixed_point, exact_marginals


def random_P(rng, n, R):
    return rng.dirichlet(np.ones(R), size=n)


def test_social_self_two_node_hand_value():
    net = complete(2)
    P = social_self_map(net, [0.5, 0.5], np.full((2, 2), 0.5), [[1.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(P, [[0.75, 0.25], [0.75, 0.25]], atol=1e-15)


def test_case1_fixed_point_is_invariant():
    net = erdos_renyi(10, 0.4, seed=1)
    alpha = np.linspace(0.1, 0.9, 10)
    P_star = np.tile([3 / 7, 4 / 7], (10, 1))
    np.testing.assert_allclose(social_self_map(net, alpha, DELTA_STRONG, P_star), P_star, atol=1e-15)


def test_near_social_only_limit(rng):
    net = erdos_renyi(8, 0.5, seed=2)
    P = random_P(rng, 8, 3)
    D = rng.dirichlet(np.ones(3), size=3)
    out = social_self_map(net, np.full(8, 1 - 1e-9), D, P)
    np.testing.assert_allclose(out, net.normalized @ P, atol=1e-8)


@pytest.mark.parametrize("model", [SOCIAL_SELF, SELF_SOCIAL])
def test_maps_preserve_simplex(model, rng):
    for _ in range(1000):
        n, R = rng.integers(2, 8), rng.integers(1, 5)
        net = complete(int(n))
        alpha = rng.uniform(0.01, 0.99, n)
        D = rng.dirichlet(np.ones(R), size=R)
        out = (social_self_map if model == SOCIAL_SELF else self_social_map)(net, alpha, D, random_P(rng, n, R))
        assert out.min() >= -1e-15
        np.testing.assert_allclose(out.sum(axis=1), 1.0, atol=1e-12)


def test_self_social_fixed_and_trivial_cases(rng):
    net = erdos_renyi(6, 0.5, seed=3)
    alpha = rng.uniform(0.1, 0.9, 6)
    D = np.array([[0.4, 0.6], [0.6, 0.4]])
    half = np.full((6, 2), 0.5)
    np.testing.assert_allclose(self_social_map(net, alpha, D, half), half, atol=1e-15)
    one = np.ones((6, 1))
    np.testing.assert_allclose(self_social_map(net, alpha, [[1.0]], one), one, atol=1e-15)


def test_dimension_mismatch():
    f = make_social_self_map(complete(3), [0.5] * 3, DELTA_STRONG)
    with pytest.raises(DimensionMismatchError):
        f(np.full((3, 3), 1 / 3))


def test_snap_unit():
    assert snap_unit([-1e-16, 1 + 1e-16]).tolist() == [0.0, 1.0]
    with pytest.raises(InvariantViolationError):
        snap_unit([-1e-12])


def test_social_self_exact_against_enumeration(rng):
    # the conditional update is linear in the node indicators, so marginals are exact on any graph
    for A in ([[0, 1], [1, 0]], [[0, 1, 0], [1, 0, 1], [0, 1, 0]]):
        A = np.array(A)
        n = len(A)
        net = build_social_network(A)
        alpha = rng.uniform(0.1, 0.9, n)
        D = rng.dirichlet(np.ones(3), size=3)
        P0 = random_P(rng, n, 3)
        exact = exact_marginals(SOCIAL_SELF, A, alpha, D, P0, 8)
        np.testing.assert_allclose(trajectory(SOCIAL_SELF, net, alpha, D, P0, 8), exact, atol=1e-13)


def test_self_social_exact_only_at_first_step(rng):
    A = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    net = build_social_network(A)
    alpha = rng.uniform(0.1, 0.9, 3)
    D = rng.dirichlet(np.ones(3), size=3)
    P0 = random_P(rng, 3, 3)
    exact = exact_marginals(SELF_SOCIAL, A, alpha, D, P0, 5)
    ncpm = trajectory(SELF_SOCIAL, net, alpha, D, P0, 5)
    np.testing.assert_allclose(ncpm[1], exact[1], atol=1e-13)
    # later steps carry a finite, reported discrepancy
    assert np.abs(ncpm - exact).max() < 0.2


# -- two products -------------------------------------------------------------


def test_two_product_params():
    p = TwoProduct(0.3, 0.5)
    assert p.delta12 == pytest.approx(0.7) and p.delta21 == pytest.approx(0.5)
    with pytest.raises(ParameterOrderError):
        TwoProduct(0.6, 0.4).require_order()
    assert TwoProduct.from_matrix([[0.3, 0.7], [0.5, 0.5]]) == p


def test_h_special_values(rng):
    net = erdos_renyi(7, 0.5, seed=4)
    alpha = rng.uniform(0.1, 0.9, 7)
    sym = TwoProduct(0.4, 0.4)
    np.testing.assert_allclose(two_product_h(np.full(7, 0.5), sym, net, alpha), 0.5, atol=1e-15)
    p = TwoProduct(0.3, 0.5)
    np.testing.assert_allclose(two_product_h(np.zeros(7), p, net, alpha), p.delta12, atol=1e-15)


def test_h_matches_general_self_social(rng):
    for _ in range(100):
        n = int(rng.integers(2, 10))
        net = erdos_renyi(n, 0.6, seed=int(rng.integers(1 << 30)))
        alpha = rng.uniform(0.05, 0.95, n)
        d11, d22 = np.sort(rng.uniform(0.01, 0.99, 2))
        p = TwoProduct(d11, d22)
        x = rng.random(n)
        P = np.column_stack([1 - x, x])
        np.testing.assert_allclose(two_product_h(x, p, net, alpha),
                                   self_social_map(net, alpha, p.matrix, P)[:, 1], atol=1e-14)


def test_T_endpoints():
    net = complete(4)
    alpha = np.full(4, 0.5)
    p = TwoProduct(0.3, 0.5)
    np.testing.assert_allclose(two_product_T(np.zeros(4), p, net, alpha), 0.7 / 1.45, atol=1e-15)
    np.testing.assert_allclose(two_product_T(np.ones(4), p, net, alpha), 0.95 / 1.45, atol=1e-15)


def test_h_maps_cube_into_cube(rng):
    net = erdos_renyi(6, 0.5, seed=5)
    corners = np.array(np.meshgrid(*[[0.0, 1.0]] * 6)).reshape(6, -1).T
    for k in range(1000):
        alpha = rng.uniform(0.01, 0.99, 6)
        d11, d22 = rng.uniform(0.01, 0.99, 2)
        x = corners[k % len(corners)] if k < 2 * len(corners) else rng.random(6)
        y = two_product_h(x, TwoProduct(d11, d22), net, alpha)
        assert y.min() >= 0.0 and y.max() <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(0, 2**31))
def test_T_is_monotone_and_contracting(a, b, seed):
    d11, d22 = min(a, b), max(a, b)
    rng = np.random.default_rng(seed)
    n = 6
    net = erdos_renyi(n, 0.5, seed=seed)
    alpha = rng.uniform(0.01, 0.99, n)
    p = TwoProduct(d11, d22)
    T = make_two_product_T(p, net, alpha)
    x = rng.random(n)
    y = np.minimum(1.0, x + rng.random(n) * 0.5)
    assert np.all(T(x) <= T(y) + 1e-15)
    lip = t_contraction_factors(p, alpha).max()
    assert np.abs(T(x) - T(y)).max() <= lip * np.abs(x - y).max() + 1e-15


def test_social_self_contraction_property(rng):
    net = erdos_renyi(10, 0.4, seed=6)
    alpha = rng.uniform(0.05, 0.95, 10)
    eps = contraction_constants(DELTA_STRONG, alpha).epsilon
    P_star = np.tile([3 / 7, 4 / 7], (10, 1))
    f = make_social_self_map(net, alpha, DELTA_STRONG)
    for _ in range(200):
        X = random_P(rng, 10, 2)
        assert np.abs(f(X) - P_star).max() <= eps * np.abs(X - P_star).max() + 1e-15


def test_iterate_reports_and_raises():
    res = iterate(lambda x: 0.5 * x, np.ones(3), tol=1e-10)
    assert res.converged and res.rate_estimate == pytest.approx(0.5)
    with pytest.raises(NotConvergedError) as info:
        iterate(lambda x: x + 1.0, np.zeros(2), max_iter=5)
    assert info.value.iterations == 5 and info.value.residual == 1.0
    traj = iterate(lambda x: x + 1.0, np.zeros(2), max_iter=5, keep_trajectory=True)
    assert not traj.converged and len(traj.trajectory) == 6 and traj.fixed_point is None


def test_fixed_point_symmetric_params_is_half():
    net = erdos_renyi(8, 0.5, seed=7)
    p = solve_two_product_fixed_point(TwoProduct(0.5, 0.5), net, np.linspace(0.1, 0.9, 8))
    np.testing.assert_allclose(p, 0.5, atol=1e-10)


def test_fixed_point_within_interval(rng):
    net = erdos_renyi(12, 0.4, seed=8)
    p = solve_two_product_fixed_point(TwoProduct(0.3, 0.5), net, rng.uniform(0.05, 0.95, 12))
    assert p.min() >= 0.5 - 1e-10 and p.max() <= 0.7 / 1.2 + 1e-10


@pytest.mark.parametrize("a", [0.1, 0.5, 0.9])
def test_fixed_point_matches_bisection(a):
    p = solve_two_product_fixed_point(TwoProduct(0.3, 0.5), complete(2), [a, a], tol=1e-14)
    q = bisect_symmetric_fixed_point(0.3, 0.5, a, lo=0.5, hi=0.7 / 1.2)
    np.testing.assert_allclose(p, q, atol=1e-12)


def test_fixed_point_rejects_wrong_order():
    with pytest.raises(ParameterOrderError):
        solve_two_product_fixed_point(TwoProduct(0.6, 0.4), complete(3), [0.5] * 3)
