"""Constant-speed FGW geodesics between two structured objects."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SolverParams, StructuredObject
from .exceptions import DimensionMismatch, InvalidParameter
from .fgw import FgwSolution, solve_fgw

SUPPORT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GeodesicPoint:
    """Interpolated object at time ``t``.

    ``support`` lists the ``(i, j)`` pairs of the optimal coupling kept as
    nodes; weights are the coupling masses on them.
    """

    t: float
    object: StructuredObject
    support: np.ndarray


class Geodesic:
    """Callable ``t -> GeodesicPoint`` built from one optimal coupling.

    Parameters
    ----------
    src, dst : StructuredObject
    params : SolverParams, optional
    solution : FgwSolution, optional
        Reuse a coupling instead of solving for one.

    Examples
    --------
    >>> path = Geodesic(x, y)                      # doctest: +SKIP
    >>> path(0.5).object.weights.sum()             # doctest: +SKIP
    1.0
    """

    def __init__(self, src: StructuredObject, dst: StructuredObject,
                 params: SolverParams | None = None, solution: FgwSolution | None = None):
        if src.d != dst.d:
            raise DimensionMismatch(f"feature dimensions differ: {src.d} vs {dst.d}")
        self.src, self.dst = src, dst
        self.params = params or SolverParams()
        self.solution = solution or solve_fgw(src, dst, self.params)
        P = self.solution.coupling.matrix
        rows, cols = np.nonzero(P > SUPPORT_TOL)
        w = P[rows, cols]
        self.support = np.c_[rows, cols]
        self.weights = w / w.sum()
        self._C1 = src.structure[np.ix_(rows, rows)]
        self._C2 = dst.structure[np.ix_(cols, cols)]
        self._A = src.features[rows]
        self._B = dst.features[cols]

    @property
    def distance(self) -> float:
        return self.solution.value

    def __call__(self, t: float) -> GeodesicPoint:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise InvalidParameter(f"t must lie in [0, 1], got {t}")
        C = (1.0 - t) * self._C1 + t * self._C2
        A = (1.0 - t) * self._A + t * self._B
        return GeodesicPoint(t, StructuredObject(C, A, self.weights), self.support)


def geodesic(src: StructuredObject, dst: StructuredObject,
             params: SolverParams | None = None) -> Geodesic:
    """Geodesic between ``src`` and ``dst`` through their optimal FGW coupling."""
    return Geodesic(src, dst, params)
