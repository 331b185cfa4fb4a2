"""Labelled graphs and their shortest-path structure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ..core import Histogram, StructuredObject
from ..exceptions import DimensionMismatch, DisconnectedGraph


@dataclass(frozen=True, eq=False)
class GraphSpec:
    """Undirected weighted graph with node features and node weights.

    ``edges`` is a sequence of ``(i, j, weight)``; ``labels`` optionally
    carries ground-truth node classes for generated fixtures.
    """

    n: int
    edges: tuple
    features: np.ndarray
    weights: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        edges = tuple(
            (int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0) for e in self.edges
        )
        for i, j, w in edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise DimensionMismatch(f"edge ({i}, {j}) references a node outside 0..{self.n - 1}")
            if not w > 0:
                raise ValueError(f"edge ({i}, {j}) has nonpositive weight {w}")
        F = np.array(self.features, dtype=np.float64)
        if F.ndim == 1:
            F = F[:, None]
        if F.shape[0] != self.n:
            raise DimensionMismatch(f"features must have {self.n} rows, got {F.shape[0]}")
        h = Histogram.uniform(self.n) if self.weights is None else Histogram(self.weights)
        if len(h) != self.n:
            raise DimensionMismatch(f"weights must have length {self.n}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "features", F)
        object.__setattr__(self, "weights", h.weights)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            if i != j:
                A[i, j] = A[j, i] = w
        return A

    def degrees(self) -> np.ndarray:
        return (self.adjacency() > 0).sum(1)


def _components(A):
    k, lab = connected_components(A, directed=False)
    return [np.flatnonzero(lab == c) for c in range(k)]


def shortest_path_matrix(A) -> np.ndarray:
    """All-pairs shortest paths of a weighted adjacency matrix (0 = no edge).

    Unreachable pairs are ``inf``.
    """
    A = np.asarray(A, dtype=np.float64)
    unit = np.all((A == 0) | (A == 1))
    G = coo_matrix(A)
    return shortest_path(G, method="D", directed=False, unweighted=bool(unit))


def shortest_path_structure(g: GraphSpec) -> StructuredObject:
    """Structured object whose structure is the shortest-path metric of ``g``.

    Raises
    ------
    DisconnectedGraph
        If ``g`` has more than one connected component.

    Examples
    --------
    >>> g = GraphSpec(3, [(0, 1, 1.0), (1, 2, 1.0)], np.zeros(3))
    >>> shortest_path_structure(g).structure
    array([[0., 1., 2.],
           [1., 0., 1.],
           [2., 1., 0.]])
    """
    A = g.adjacency()
    comps = _components(A)
    if len(comps) > 1:
        raise DisconnectedGraph(comps)
    return StructuredObject(shortest_path_matrix(A), g.features, g.weights)
