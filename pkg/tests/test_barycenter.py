import numpy as np
import pytest

from conftest import random_object
from fgwkit import (
    BarycenterProblem,
    SolverParams,
    StructuredObject,
    recover_adjacency,
    solve_barycenter,
    solve_fgw,
)
from fgwkit.exceptions import (
    DimensionMismatch,
    EmptyCandidateSet,
    IncompatibleQ,
    InvalidParameter,
    InvalidStructuredObject,
)
from fgwkit.toolkit import GraphSpec, shortest_path_matrix


def path_sp(n):
    return shortest_path_matrix(GraphSpec(n, [(k, k + 1) for k in range(n - 1)], np.zeros(n)).adjacency())


def monotone(trace):
    return all(b <= a + 1e-10 for a, b in zip(trace, trace[1:]))


def test_two_single_nodes_closed_form():
    # minimise 0.5 (a - 0)^2 + 0.5 (a - 4)^2 over a: a = 2, value (1 - alpha) * 4
    xs = [StructuredObject([[0.0]], [0.0]), StructuredObject([[0.0]], [4.0])]
    for alpha in (0.0, 0.3, 0.9):
        sol = solve_barycenter(BarycenterProblem(xs, [0.5, 0.5], 1, params=SolverParams(alpha=alpha)))
        assert sol.barycenter.features[0, 0] == pytest.approx(2.0)
        assert sol.objective == pytest.approx(4 * (1 - alpha))


def test_single_input_round_trip(rng):
    for seed in range(5):
        x = random_object(rng, 7, d=2, uniform=True)
        sol = solve_barycenter(BarycenterProblem([x], None, 7, x.weights,
                                                 SolverParams(q=2, seed=seed)))
        assert sol.objective < 1e-6
        assert solve_fgw(sol.barycenter, x, SolverParams(q=2)).value < 1e-6


def test_single_input_round_trip_from_input_start(rng):
    # with distinct weights only the identity coupling reaches zero, so the
    # start has to carry the input's node order
    x = random_object(rng, 7, d=2)
    sol = solve_barycenter(BarycenterProblem([x], None, 7, x.weights,
                                             init_structure=x.structure, init_features=x.features))
    assert sol.objective < 1e-6


def test_two_identical_inputs(rng):
    x = random_object(rng, 5, uniform=True)
    sol = solve_barycenter(BarycenterProblem([x, x], [0.3, 0.7], 5))
    assert sol.objective < 1e-6


def test_degenerate_lambda_recovers_first_input(rng):
    x, y = random_object(rng, 6, uniform=True), random_object(rng, 5)
    sol = solve_barycenter(BarycenterProblem([x, y], [1.0, 0.0], 6, x.weights))
    assert sol.objective < 1e-6


def test_fixed_structure_recovers_features(rng):
    x = random_object(rng, 6, d=3)
    sol = solve_barycenter(BarycenterProblem([x], None, 6, x.weights, fixed_structure=x.structure,
                                             max_outer=1))
    np.testing.assert_allclose(sol.barycenter.features, x.features, atol=1e-9)
    np.testing.assert_array_equal(sol.barycenter.structure, x.structure)


def test_fixed_features_are_kept(rng):
    xs = [random_object(rng, 5) for _ in range(3)]
    A = np.linspace(-1, 1, 4)[:, None]
    sol = solve_barycenter(BarycenterProblem(xs, None, 4, fixed_features=A))
    np.testing.assert_array_equal(sol.barycenter.features, A)


def test_objective_is_monotone_and_output_valid(rng):
    for seed in range(4):
        xs = [random_object(rng, int(rng.integers(4, 9))) for _ in range(3)]
        sol = solve_barycenter(BarycenterProblem(xs, [0.2, 0.3, 0.5], 6,
                                                 params=SolverParams(alpha=0.5, seed=seed)))
        assert monotone(sol.objective_trace)
        C = sol.barycenter.structure
        np.testing.assert_array_equal(C, C.T)
        assert np.all(np.diag(C) == 0)
        for P, x in zip(sol.couplings, xs):
            np.testing.assert_allclose(P.matrix.sum(0), x.weights, atol=1e-9)


def test_input_order_invariance(rng):
    xs = [random_object(rng, 5, uniform=True) for _ in range(3)]
    lam = np.array([0.2, 0.3, 0.5])
    perm = [2, 0, 1]
    p = SolverParams(alpha=0.5, restarts=3)
    a = solve_barycenter(BarycenterProblem(xs, lam, 4, params=p)).objective
    b = solve_barycenter(BarycenterProblem([xs[k] for k in perm], lam[perm], 4, params=p)).objective
    assert a == pytest.approx(b, rel=1e-9)


def test_numerical_fallback_for_other_q(rng):
    xs = [random_object(rng, 4) for _ in range(2)]
    with pytest.raises(IncompatibleQ):
        BarycenterProblem(xs, None, 3, params=SolverParams(q=1))
    sol = solve_barycenter(BarycenterProblem(xs, None, 3, params=SolverParams(q=1),
                                             numerical_fallback=True, max_outer=5))
    assert monotone(sol.objective_trace)


def test_problem_validation(rng):
    x = random_object(rng, 3)
    with pytest.raises(InvalidParameter):
        BarycenterProblem([x], [0.5], 3)
    with pytest.raises(InvalidParameter):
        BarycenterProblem([x], None, 3, params=SolverParams(p=2))
    with pytest.raises(DimensionMismatch):
        BarycenterProblem([x, random_object(rng, 3, d=2)], None, 3)
    with pytest.raises(InvalidStructuredObject):
        BarycenterProblem([x], None, 2, fixed_structure=[[0, 1], [2, 0]])


class TestRecoverAdjacency:
    def test_path_fixed_point(self):
        A, thr, res = recover_adjacency(path_sp(3))
        np.testing.assert_array_equal(A, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
        assert thr == 1.0 and res == 0.0

    def test_four_cycle(self):
        C = shortest_path_matrix(GraphSpec(4, [(0, 1), (1, 2), (2, 3), (3, 0)], np.zeros(4)).adjacency())
        A, _, res = recover_adjacency(C)
        assert A.sum(1).tolist() == [2, 2, 2, 2] and res == 0.0

    def test_noisy_path(self, rng):
        C0 = path_sp(4)
        true = (C0 == 1).astype(int)
        for _ in range(20):
            E = rng.normal(0, 0.05, (4, 4))
            C = np.abs(C0 + (E + E.T) / 2)
            np.fill_diagonal(C, 0)
            A, _, _ = recover_adjacency(C)
            np.testing.assert_array_equal(A, true)

    def test_ties_go_to_smaller_threshold(self):
        # every threshold gives the complete graph K3, so the smallest wins
        C = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], float)
        assert recover_adjacency(C)[1] == 1.0

    def test_empty_candidate_set(self):
        with pytest.raises(EmptyCandidateSet):
            recover_adjacency(np.zeros((1, 1)))
