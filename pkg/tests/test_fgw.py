import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_energy, brute_loss_tensor, random_coupling, random_object
from fgwkit import (
    Coupling,
    LossTensor,
    SolverParams,
    StructuredObject,
    additive_objective,
    apply_loss_tensor,
    feature_term,
    fgw_objective,
    gw_distance,
    gw_solve,
    reparameterize_alpha,
    solve_fgw,
    solve_fgw_path,
    solve_linear_ot,
    structure_term,
)
from fgwkit.core import feature_cost_matrix
from fgwkit.exceptions import DimensionMismatch, InvalidStructuredObject, MarginalMismatch

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.mark.parametrize("p", [1, 2])
@pytest.mark.parametrize("q", [1, 2, 3])
def test_objective_matches_brute_force(rng, p, q):
    for _ in range(5):
        x = random_object(rng, int(rng.integers(1, 5)), d=2)
        y = random_object(rng, int(rng.integers(1, 5)), d=2)
        P = random_coupling(rng, x.weights, y.weights)
        alpha = rng.random()
        got = fgw_objective(x, y, P, SolverParams(alpha=alpha, p=p, q=q))
        assert got == pytest.approx(brute_energy(x, y, P, alpha, p, q), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("q", [1, 2, 3])
@pytest.mark.parametrize("mode", ["naive", "sparse", "auto"])
def test_loss_tensor_modes(rng, q, mode):
    for _ in range(10):
        n, m = rng.integers(1, 9, size=2)
        C1, C2 = rng.random((n, n)), rng.random((m, m))
        C1, C2 = C1 + C1.T, C2 + C2.T
        P = rng.random((n, m)) * (rng.random((n, m)) < 0.5)
        ref = brute_loss_tensor(C1, C2, P, q)
        np.testing.assert_allclose(apply_loss_tensor(C1, C2, P, q, mode), ref, rtol=1e-10, atol=1e-13)


def test_squared_fast_path(rng):
    for _ in range(20):
        n, m = rng.integers(1, 12, size=2)
        C1, C2 = rng.random((n, n)), rng.random((m, m))
        C1, C2 = C1 + C1.T, C2 + C2.T
        P = rng.random((n, m))
        ref = brute_loss_tensor(C1, C2, P, 2)
        got = LossTensor(C1, C2, 2, mode="squared-fast").apply(P)
        np.testing.assert_allclose(got, ref, rtol=1e-10)


def test_product_coupling_shortcut(rng):
    for q in (1, 2, 3):
        n, m = rng.integers(1, 9, size=2)
        C1, C2 = rng.random((n, n)), rng.random((m, m))
        C1, C2 = C1 + C1.T, C2 + C2.T
        h, g = rng.random(n) + 0.1, rng.random(m) + 0.1
        h, g = h / h.sum(), g / g.sum()
        ref = brute_loss_tensor(C1, C2, np.outer(h, g), q)
        np.testing.assert_allclose(LossTensor(C1, C2, q).apply_product(h, g), ref, rtol=1e-10)


class TestTwoByTwo:
    """Two-point spaces at distances 1 and 2, uniform weights."""

    x = StructuredObject(SWAP, np.zeros(2))
    y = StructuredObject(2 * SWAP, np.zeros(2))
    params = SolverParams(alpha=1.0, p=1, q=1)

    @staticmethod
    def pi(t):
        return np.array([[t, 0.5 - t], [0.5 - t, t]])

    def test_uniform_coupling_value(self):
        # |0-0| on matching diagonals, 2 for (i=k, j!=l), 1 otherwise:
        # E(t) = 1/2 + 4t - 8t^2 along the segment, so E(1/4) = 1
        assert fgw_objective(self.x, self.y, self.pi(0.25), self.params) == pytest.approx(1.0)

    def test_closed_form_along_polytope(self):
        for t in np.linspace(0, 0.5, 11):
            E = fgw_objective(self.x, self.y, self.pi(t), self.params)
            assert E == pytest.approx(0.5 + 4 * t - 8 * t * t, abs=1e-14)

    def test_gw_reaches_polytope_minimum(self):
        assert gw_distance(self.x, self.y, p=1, q=1) == pytest.approx(0.5, abs=1e-12)


def test_self_distance_is_zero(rng):
    for q in (1, 2):
        for _ in range(10):
            x = random_object(rng, int(rng.integers(1, 8)), d=2)
            assert solve_fgw(x, x, SolverParams(q=q)).value == 0.0


def test_permuted_copy_is_at_distance_zero(rng):
    for _ in range(10):
        x = random_object(rng, 6, d=1)
        y = x.permute(rng.permutation(6))
        assert solve_fgw(x, y, SolverParams(q=2, restarts=10)).value <= 1e-9


def test_symmetric_in_arguments(rng):
    for _ in range(10):
        x = random_object(rng, int(rng.integers(2, 7)))
        y = random_object(rng, int(rng.integers(2, 7)))
        p = SolverParams(alpha=0.4, q=2)
        assert solve_fgw(x, y, p).value == pytest.approx(solve_fgw(y, x, p).value, abs=1e-12)


@pytest.mark.parametrize("p", [1, 2])
@pytest.mark.parametrize("q", [1, 2])
def test_alpha_zero_is_wasserstein(rng, p, q):
    for _ in range(10):
        x, y = random_object(rng, 5, d=2), random_object(rng, 4, d=2)
        M = feature_cost_matrix(x, y, p * q)
        W = solve_linear_ot(M, x.weights, y.weights).cost  # W_{pq}^{pq}
        val = solve_fgw(x, y, SolverParams(alpha=0.0, p=p, q=q)).value
        assert val == pytest.approx(W ** (1 / p), abs=1e-12)


def test_linear_decomposition_p1(rng):
    x, y = random_object(rng, 5, d=2), random_object(rng, 6, d=2)
    P = random_coupling(rng, x.weights, y.weights)
    for q in (1, 2):
        E = fgw_objective(x, y, P, SolverParams(alpha=0.3, q=q))
        ref = 0.7 * feature_term(x, y, P, 1, q) + 0.3 * structure_term(x, y, P, 1, q)
        assert E == pytest.approx(ref, rel=1e-12)


def test_additive_reparameterization(rng):
    x, y = random_object(rng, 4), random_object(rng, 5)
    P = random_coupling(rng, x.weights, y.weights)
    for at in (0.5, 1.0, 4.0):
        a = reparameterize_alpha(at)
        for p in (1, 2):
            E = fgw_objective(x, y, P, SolverParams(alpha=a, p=p, q=2))
            assert additive_objective(x, y, P, at, p, 2) == pytest.approx(E / (1 - a) ** p, rel=1e-12)


def test_trace_is_nonincreasing(rng):
    for p in (1, 2):
        x, y = random_object(rng, 7), random_object(rng, 8)
        sol = solve_fgw(x, y, SolverParams(alpha=0.6, p=p, q=2, restarts=3))
        assert np.all(np.diff(sol.trace) <= 1e-12 * max(sol.trace))
        assert sol.objective == pytest.approx(sol.trace[-1], rel=1e-9, abs=1e-15)
        assert sol.value == pytest.approx(sol.objective ** (1 / p))


def test_warm_start_never_hurts(rng):
    x, y = random_object(rng, 6), random_object(rng, 6)
    params = SolverParams(alpha=0.5, q=2, restarts=0)
    P0 = random_coupling(rng, x.weights, y.weights)
    sol = solve_fgw(x, y, params, init=[P0])
    assert sol.objective <= fgw_objective(x, y, P0, params) + 1e-15


def test_returned_coupling_is_feasible_and_consistent(rng):
    x, y = random_object(rng, 5), random_object(rng, 7)
    params = SolverParams(alpha=0.5, p=2, q=1)
    sol = solve_fgw(x, y, params)
    P = sol.coupling.matrix
    np.testing.assert_allclose(P.sum(1), x.weights, atol=1e-12)
    np.testing.assert_allclose(P.sum(0), y.weights, atol=1e-12)
    assert fgw_objective(x, y, P, params) == pytest.approx(sol.objective, rel=1e-12)


def test_gw_ignores_features():
    x = StructuredObject(SWAP, np.zeros((2, 1)))
    y = StructuredObject(SWAP, np.ones((2, 5)))
    assert gw_solve(x, y, SolverParams()).value == 0.0


def test_errors():
    x = StructuredObject(SWAP, np.zeros((2, 1)))
    y = StructuredObject(SWAP, np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        solve_fgw(x, y)
    bad = StructuredObject([[0, 1], [2, 0]], [0, 0])
    with pytest.raises(InvalidStructuredObject):
        solve_fgw(bad, x)
    with pytest.raises(MarginalMismatch):
        fgw_objective(x, x, [[1, 0], [0, 0]], SolverParams())


def test_alpha_path_is_concave(rng):
    alphas = np.linspace(0, 1, 11)
    for _ in range(3):
        x, y = random_object(rng, 6), random_object(rng, 5)
        v = np.array([s.objective for s in solve_fgw_path(x, y, alphas, SolverParams(q=2))])
        assert np.all(v[1:-1] >= (v[:-2] + v[2:]) / 2 - 1e-12)
        for a, s in zip(alphas, solve_fgw_path(x, y, alphas, SolverParams(q=2))):
            assert s.objective <= solve_fgw(x, y, SolverParams(alpha=a, q=2)).objective + 1e-14


def test_reparameterize_alpha():
    assert reparameterize_alpha(1.0) == 0.5
    assert reparameterize_alpha(4.0) == pytest.approx(0.8)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_solution_bounded_by_product_coupling(n, m, alpha, seed):
    rng = np.random.default_rng(seed)
    x, y = random_object(rng, n), random_object(rng, m)
    params = SolverParams(alpha=alpha, q=2, restarts=1)
    sol = solve_fgw(x, y, params)
    prod = Coupling.product(x.weights, y.weights)
    assert 0.0 <= sol.objective <= fgw_objective(x, y, prod, params) + 1e-12
