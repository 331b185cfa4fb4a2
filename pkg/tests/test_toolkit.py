import numpy as np
import pytest

from fgwkit import SolverParams, StructuredObject, gw_distance, solve_fgw, wasserstein_distance
from fgwkit.exceptions import DimensionMismatch, DisconnectedGraph, InvalidParameter, NonSymmetricInput
from fgwkit.toolkit import (
    GraphSpec,
    concentration_experiment,
    fit_loglog,
    make_cycle_mesh,
    make_empirical_1d_pair,
    make_equivalent_objects_pair,
    make_isometric_graphs,
    make_noisy_loop_graphs,
    make_sbm,
    make_shifted_image_pair,
    make_toy_trees,
    make_two_hump_series,
    mds_embed,
    product_metric,
    shortest_path_matrix,
    shortest_path_structure,
)

DX = [[0, 1, 1, 1], [1, 0, 1, 2], [1, 1, 0, 2], [1, 2, 2, 0]]
DY = [[0, 1, 1, 1], [1, 0, 2, 2], [1, 2, 0, 1], [1, 2, 1, 0]]


class TestGraph:
    def test_path_graph(self):
        g = GraphSpec(3, [(0, 1), (1, 2)], np.zeros(3))
        np.testing.assert_array_equal(shortest_path_structure(g).structure,
                                      [[0, 1, 2], [1, 0, 1], [2, 1, 0]])

    def test_weighted_edge(self):
        g = GraphSpec(2, [(0, 1, 2.5)], np.zeros(2))
        np.testing.assert_array_equal(shortest_path_structure(g).structure, [[0, 2.5], [2.5, 0]])

    def test_weighted_shortcut(self):
        A = np.zeros((3, 3))
        A[0, 1] = A[1, 0] = 1.0
        A[1, 2] = A[2, 1] = 1.0
        A[0, 2] = A[2, 0] = 3.0
        assert shortest_path_matrix(A)[0, 2] == 2.0

    def test_disconnected(self):
        g = GraphSpec(4, [(0, 1), (2, 3)], np.zeros(4))
        with pytest.raises(DisconnectedGraph) as exc:
            shortest_path_structure(g)
        assert len(exc.value.components) == 2

    def test_bad_edges(self):
        with pytest.raises(DimensionMismatch):
            GraphSpec(2, [(0, 2)], np.zeros(2))
        with pytest.raises(ValueError):
            GraphSpec(2, [(0, 1, 0.0)], np.zeros(2))


class TestFixtures:
    def test_isometric_graphs(self):
        x, y = make_isometric_graphs()
        np.testing.assert_array_equal(x.structure, DX)
        np.testing.assert_array_equal(y.structure, DY)
        # x1 -> y1, x2 -> y3, x3 -> y4, x4 -> y2
        sigma = [0, 2, 3, 1]
        np.testing.assert_array_equal(np.asarray(DY)[np.ix_(sigma, sigma)], DX)
        assert gw_distance(x, y, q=1) == 0.0

    def test_toy_trees(self):
        t1, t2 = make_toy_trees()
        assert t1.n == t2.n == 15
        np.testing.assert_array_equal(t1.structure, t2.structure)
        params = SolverParams(alpha=0.5, q=1, restarts=10)
        assert wasserstein_distance(t1, t2, 1) == 0.0
        assert gw_distance(t1, t2, q=1) == 0.0
        assert solve_fgw(t1, t2, params).value > 0.05

    def test_equivalent_objects_pair(self):
        x, y = make_equivalent_objects_pair()
        px = StructuredObject(product_metric(x), np.zeros(4))
        py = StructuredObject(product_metric(y), np.zeros(4))
        assert gw_distance(px, py, q=1) < 1e-12
        assert solve_fgw(x, y, SolverParams(alpha=0.5, q=1, restarts=20)).value > 0.01

    def test_shifted_image_pair(self):
        a, b = make_shifted_image_pair(12, 3)
        assert a.n == 144 and a.d == 1
        np.testing.assert_array_equal(np.sort(a.features.ravel()), np.sort(b.features.ravel()))
        assert not np.array_equal(a.features, b.features)
        with pytest.raises(InvalidParameter):
            make_shifted_image_pair(6, 5)

    def test_empirical_1d_pair(self):
        x, y = make_empirical_1d_pair(20, 30, seed=1)
        assert (x.n, y.n) == (20, 30)
        assert x.features[:10].mean() < 0 < x.features[10:].mean()
        assert y.features[:15].mean() > 0 > y.features[15:].mean()

    @pytest.mark.parametrize("kind", ["circle", "eight"])
    def test_loop_graphs(self, kind):
        gs = make_noisy_loop_graphs(kind, count=30, seed=3)
        assert all(10 <= g.n <= 25 for g in gs)
        for g in gs:
            shortest_path_structure(g)
        assert [g.n for g in gs] == [g.n for g in make_noisy_loop_graphs(kind, 30, seed=3)]

    def test_eight_has_sign_discontinuity(self):
        for g in make_noisy_loop_graphs("eight", count=10, seed=0):
            a = (g.n - 1) // 2
            # noise sigma 0.1 cannot bridge the gap between +0.2 and -0.2 by much
            assert g.features[1:a + 1].mean() > 0.3
            assert g.features[a + 1:].mean() < -0.3

    def test_sbm(self):
        g = make_sbm(seed=2)
        assert g.n == 32 and g.labels.tolist() == sorted(g.labels.tolist())
        shortest_path_structure(g)
        with pytest.raises(DisconnectedGraph):
            make_sbm(blocks=(5, 5), p_in=0.0, p_out=0.0, max_tries=3)

    def test_sbm_bimodal_features_alternate(self):
        g = make_sbm(blocks=(6,), feature_means=[(-1.0, 1.0)], seed=0)
        assert np.all(g.features[0::2, 0] < 0) and np.all(g.features[1::2, 0] > 0)

    def test_two_hump_series_classes(self):
        objs, labels = make_two_hump_series(8, seed=0, return_labels=True)
        assert labels.tolist() == [0, 1] * 4
        same = (labels[:, None] == labels[None, :]) & ~np.eye(8, dtype=bool)
        diff = labels[:, None] != labels[None, :]

        def ratio(alpha):
            p = SolverParams(alpha=alpha, q=1, restarts=0)
            D = np.array([[solve_fgw(a, b, p).value for b in objs] for a in objs])
            return D[diff].mean() / D[same].mean()

        # features alone barely see the translation; structure separates the classes
        assert ratio(0.0) < 1.1
        assert ratio(0.5) > 1.5

    def test_two_hump_translation_preserves_values(self):
        t = np.linspace(0, 1, 50)
        objs = make_two_hump_series(2, seed=5)
        for o in objs:
            assert o.n == 50
            np.testing.assert_array_equal(o.structure, np.abs(t[:, None] - t[None, :]))

    def test_cycle_mesh(self):
        m = make_cycle_mesh(20)
        assert m.n == 20 and m.d == 3

    def test_generators_are_deterministic(self):
        assert make_sbm(seed=4).edges == make_sbm(seed=4).edges
        a, b = make_empirical_1d_pair(seed=7), make_empirical_1d_pair(seed=7)
        assert a[0] == b[0] and a[1] == b[1]
        s1, s2 = make_two_hump_series(4, seed=1), make_two_hump_series(4, seed=1)
        assert all(u == v for u, v in zip(s1, s2))


class TestMDS:
    def test_collinear_points(self):
        x = np.array([0.0, 1.0, 3.0, 7.0])
        D = np.abs(x[:, None] - x[None, :])
        X = mds_embed(D, 2)
        np.testing.assert_allclose(X[:, 1], 0, atol=1e-9)
        E = np.abs(X[:, :1] - X[:, :1].T)
        np.testing.assert_allclose(E, D, atol=1e-9)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(mds_embed(np.zeros((3, 3)), 2), np.zeros((3, 2)))

    def test_square(self):
        P = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
        D = np.sqrt(((P[:, None] - P[None]) ** 2).sum(-1))
        X = mds_embed(D, 2)
        np.testing.assert_allclose(np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1)), D, atol=1e-9)

    def test_pads_when_dim_exceeds_n(self):
        assert mds_embed([[0, 1], [1, 0]], 3).shape == (2, 3)

    def test_errors(self):
        with pytest.raises(NonSymmetricInput):
            mds_embed([[0, 1], [2, 0]])
        with pytest.raises(NonSymmetricInput):
            mds_embed(np.zeros((2, 3)))


def test_fit_loglog_recovers_power_law():
    n = np.array([8, 16, 32, 64])
    slope, se, icpt = fit_loglog(n, 3.0 * n ** -0.5)
    assert slope == pytest.approx(-0.5) and se < 1e-10 and icpt == pytest.approx(np.log(3.0))


def test_concentration_small_run_decreases():
    res = concentration_experiment(sizes=(4, 8, 16, 32), trials=4, seed=0, reference_size=64)
    assert res.reference_size == 64
    assert res.slope < 0
    assert len(res.means) == 4
