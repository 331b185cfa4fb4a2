"""Seeded fixture generators for the toy experiments.

Every generator is a pure function of its arguments: the same seed always
returns the same objects.
"""

from __future__ import annotations

import numpy as np

from ..core import StructuredObject
from ..exceptions import DisconnectedGraph, InvalidParameter
from .graph import GraphSpec, _components, shortest_path_matrix, shortest_path_structure

FEATURE_NOISE = 0.1
THIRD_NEIGHBOR_PROB = 0.1

BLUE, RED = -1.0, 1.0


def _binary_tree_edges(depth=3):
    n = 2 ** (depth + 1) - 1
    return n, [(k, 2 * k + 1) for k in range(n // 2)] + [(k, 2 * k + 2) for k in range(n // 2)]


def make_toy_trees():
    """Two 15-node binary trees with identical topology and leaf colours.

    Leaves of the first tree read ``B B R R B B R R`` left to right, those of
    the second ``B R B R B R B R`` (blue = -1, red = +1, internal nodes 0).
    Features and structures match separately, but no tree isometry carries
    one colouring onto the other.
    """
    n, edges = _binary_tree_edges(3)
    leaves = np.arange(7, 15)
    pattern1 = [BLUE, BLUE, RED, RED, BLUE, BLUE, RED, RED]
    pattern2 = [BLUE, RED, BLUE, RED, BLUE, RED, BLUE, RED]
    out = []
    for pattern in (pattern1, pattern2):
        f = np.zeros(n)
        f[leaves] = pattern
        out.append(shortest_path_structure(GraphSpec(n, edges, f)))
    return tuple(out)


def make_isometric_graphs():
    """The two isometric 4-node graphs (uniform weights, zero features).

    ``x1 -> y1, x2 -> y3, x3 -> y4, x4 -> y2`` is an isometry.
    """
    gx = GraphSpec(4, [(0, 1), (0, 2), (1, 2), (0, 3)], np.zeros(4))
    gy = GraphSpec(4, [(0, 1), (0, 2), (0, 3), (2, 3)], np.zeros(4))
    return shortest_path_structure(gx), shortest_path_structure(gy)


def make_equivalent_objects_pair():
    """Isometric structures with identical per-node features that are not equivalent.

    Features are 2D: node 1 sits at the origin and nodes 2, 3, 4 on an
    equilateral triangle, so the isometry ``2 -> 3 -> 4 -> 2`` also preserves
    feature distances; the product metrics ``C + d(a, a')`` are therefore
    isometric while FGW stays positive.
    """
    x, y = make_isometric_graphs()
    ang = np.deg2rad([90.0, 210.0, 330.0])
    F = np.vstack([[0.0, 0.0], np.c_[np.cos(ang), np.sin(ang)]])
    return (StructuredObject(x.structure, F, x.weights),
            StructuredObject(y.structure, F, y.weights))


def product_metric(obj: StructuredObject) -> np.ndarray:
    """Structure ``C (+) d``: ``C[i, j] + ||a_i - a_j||_2``."""
    F = obj.features
    return obj.structure + np.sqrt(((F[:, None, :] - F[None, :, :]) ** 2).sum(-1))


def _glyph(b):
    # a "7": top bar plus a diagonal stroke, inside a b x b box
    G = np.zeros((b, b))
    G[0, :] = 1.0
    for r in range(1, b):
        G[r, max(b - 1 - r, 0)] = 1.0
    G[b // 2, b // 4: 3 * b // 4] = 1.0
    return G


def grid_cityblock(size: int) -> np.ndarray:
    r, c = np.divmod(np.arange(size * size), size)
    return (np.abs(r[:, None] - r[None, :]) + np.abs(c[:, None] - c[None, :])).astype(float)


def make_shifted_image_pair(size: int = 12, shift: int = 3, glyph_size: int | None = None):
    """Binary glyph on a ``size x size`` grid and a copy translated by ``shift``.

    Both images use all pixels: feature = gray level, structure = city-block
    distance between pixel coordinates, uniform weights.  The translation is
    applied along both axes.
    """
    b = glyph_size or max(3, size // 2)
    if size < 2 or shift < 0 or 1 + shift + b > size:
        raise InvalidParameter(f"glyph of size {b} shifted by {shift} does not fit a {size} grid")
    G = _glyph(b)
    C = grid_cityblock(size)
    out = []
    for off in (1, 1 + shift):
        img = np.zeros((size, size))
        img[off:off + b, off:off + b] = G
        out.append(StructuredObject(C, img.reshape(-1, 1)))
    return tuple(out)


def make_empirical_1d_pair(n: int = 20, m: int = 30, seed: int = 0):
    """1D features in two clusters, 1D structure along a noisy time index.

    The first half of each object (in index order) sits in one feature
    cluster and the second half in the other, reversed between the objects.
    """
    rng = np.random.default_rng(seed)
    out = []
    for size, flip in ((n, False), (m, True)):
        t = np.arange(size) / (size - 1) + 0.02 * rng.standard_normal(size)
        t.sort()
        cl = (np.arange(size) >= size // 2).astype(float)
        if flip:
            cl = 1.0 - cl
        f = 2.0 * cl - 1.0 + 0.1 * rng.standard_normal(size)
        out.append(StructuredObject(np.abs(t[:, None] - t[None, :]), f))
    return tuple(out)


def _cycle(n):
    return [(k, (k + 1) % n) for k in range(n)]


def _loop_graph(kind, rng):
    n = int(rng.integers(10, 26))
    if kind == "circle":
        edges = _cycle(n)
        f = np.sin(2 * np.pi * np.arange(n) / n)
        ring = list(range(n))
        rings = [ring]
    else:
        # two cycles sharing node 0; features positive on one loop, negative on the other
        a = (n - 1) // 2
        loop_a = [0] + list(range(1, a + 1))
        loop_b = [0] + list(range(a + 1, n))
        edges = [(loop_a[k], loop_a[(k + 1) % len(loop_a)]) for k in range(len(loop_a))]
        edges += [(loop_b[k], loop_b[(k + 1) % len(loop_b)]) for k in range(len(loop_b))]
        f = np.zeros(n)
        f[1:a + 1] = np.linspace(1.0, 0.2, a)
        f[a + 1:] = np.linspace(-0.2, -1.0, n - a - 1)
        rings = [loop_a, loop_b]
    extra = []
    for ring in rings:
        L = len(ring)
        for k in range(L):
            if L > 6 and rng.random() < THIRD_NEIGHBOR_PROB:
                extra.append((ring[k], ring[(k + 3) % L]))
    f = f + FEATURE_NOISE * rng.standard_normal(n)
    return GraphSpec(n, edges + extra, f)


def make_noisy_loop_graphs(kind: str = "circle", count: int = 10, seed: int = 0):
    """Noisy ``circle`` (sine features) or ``eight`` (sign flip at the centre) graphs.

    Node counts are uniform in ``[10, 25]``; features get Gaussian noise
    (sigma 0.1) and each node gains a third-neighbour edge with probability 0.1.
    """
    if kind not in ("circle", "eight"):
        raise InvalidParameter(f"kind must be 'circle' or 'eight', got {kind!r}")
    rng = np.random.default_rng(seed)
    return [_loop_graph(kind, rng) for _ in range(count)]


def make_sbm(blocks=(8, 8, 8, 8), p_in=0.8, p_out=0.05, feature_means=None, seed=0,
             max_tries: int = 100) -> GraphSpec:
    """Stochastic block model graph with per-block Gaussian features.

    ``feature_means[b]`` is either a scalar (unimodal block) or a pair, in
    which case the nodes of block ``b`` alternate between the two means.
    The graph is resampled until connected.

    Raises
    ------
    DisconnectedGraph
        If no connected sample is found in ``max_tries`` draws.
    """
    blocks = [int(b) for b in blocks]
    n = sum(blocks)
    labels = np.repeat(np.arange(len(blocks)), blocks)
    if feature_means is None:
        feature_means = np.linspace(-1.0, 1.0, len(blocks))
    rng = np.random.default_rng(seed)
    comps = None
    for _ in range(max_tries):
        P = np.where(labels[:, None] == labels[None, :], p_in, p_out)
        U = rng.random((n, n))
        A = np.triu(U < P, 1)
        A = A | A.T
        comps = _components(A)
        if len(comps) == 1:
            break
    else:
        raise DisconnectedGraph(comps)
    f = np.empty(n)
    for b, mean in enumerate(feature_means):
        idx = np.flatnonzero(labels == b)
        means = np.atleast_1d(np.asarray(mean, dtype=float))
        f[idx] = means[np.arange(idx.size) % means.size]
    f += FEATURE_NOISE * rng.standard_normal(n)
    edges = [(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(A, 1)))]
    return GraphSpec(n, edges, f, labels=labels)


def _hump(t, center, width):
    z = np.abs(t - center) / width
    return np.where(z < 1.0, 0.5 * (1.0 + np.cos(np.pi * np.minimum(z, 1.0))), 0.0)


def make_two_hump_series(count: int = 25, class_gap: float = 0.2, seed: int = 0,
                         length: int = 50, return_labels: bool = False):
    """Two-hump signals on ``[0, 1]`` in two classes translated by ``class_gap``.

    Hump heights are uniform in ``[0, 1]``; the humps are compactly supported
    and the gap is rounded to a whole number of samples, so a translated
    signal has exactly the same multiset of values.  Structure is
    ``|t_i - t_j|`` on the uniform timestamps.
    """
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, length)
    dt = t[1] - t[0]
    gap = round(class_gap / dt) * dt
    width = 0.08
    centers = np.array([0.2, 0.5])
    if centers[-1] + gap + width > 1.0:
        raise InvalidParameter(f"class_gap {class_gap} pushes the humps outside [0, 1]")
    C = np.abs(t[:, None] - t[None, :])
    objs, labels = [], []
    for k in range(count):
        label = k % 2
        heights = rng.uniform(0.0, 1.0, 2)
        x = sum(hh * _hump(t, c + label * gap, width) for hh, c in zip(heights, centers))
        objs.append(StructuredObject(C, x))
        labels.append(label)
    if return_labels:
        return objs, np.array(labels)
    return objs


def make_cycle_mesh(n: int = 20, chord_step: int = 5, seed: int = 0, scale: float = 1.0):
    """Small stand-in for a mesh: a cycle with chords, 3D vertex positions as features."""
    rng = np.random.default_rng(seed)
    theta = 2 * np.pi * np.arange(n) / n
    X = np.c_[np.cos(theta), np.sin(theta), 0.1 * rng.standard_normal(n)] * scale
    edges = _cycle(n) + [(k, (k + chord_step) % n) for k in range(0, n, chord_step)]
    return shortest_path_structure(GraphSpec(n, edges, X))


def graph_objects(graphs):
    return [shortest_path_structure(g) for g in graphs]


def random_connected_graph_structure(N: int, rng, edge_prob=None, max_tries=1000):
    """Shortest-path matrix of a connected Erdos-Renyi graph on ``N`` nodes."""
    if N == 1:
        return np.zeros((1, 1))
    p = min(1.0, 3.0 / N) if edge_prob is None else edge_prob
    for _ in range(max_tries):
        A = np.triu(rng.random((N, N)) < p, 1)
        A = (A | A.T).astype(float)
        D = shortest_path_matrix(A)
        if np.all(np.isfinite(D)):
            return D
    raise DisconnectedGraph([[i] for i in range(N)])
