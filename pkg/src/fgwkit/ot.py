"""Exact discrete optimal transport and the Wasserstein distance."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._simplex import STATUS_OPTIMAL, transport_simplex
from .core import Coupling, Histogram, StructuredObject, check_structured_object, feature_cost_matrix
from .exceptions import DimensionMismatch, InfeasibleMarginals, NonFiniteCost

MASS_TOL = 1e-9


@dataclass(frozen=True)
class OtSolution:
    """Optimal coupling of a linear transport problem with its dual certificate.

    Attributes
    ----------
    coupling : Coupling
        Optimal vertex of the transport polytope (at most ``n + m - 1`` nonzeros).
    cost : float
        ``<coupling, M>``.
    iterations : int
        Number of simplex pivots.
    dual_source, dual_target : ndarray
        Potentials ``u``, ``v`` with ``u_i + v_j <= M_ij`` and equality on the
        support of the coupling.
    """

    coupling: Coupling
    cost: float
    iterations: int
    dual_source: np.ndarray
    dual_target: np.ndarray
    converged: bool = True

    @property
    def dual_cost(self) -> float:
        return float(self.coupling.source.weights @ self.dual_source
                     + self.coupling.target.weights @ self.dual_target)


def _check_histograms(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if abs(a.sum() - b.sum()) > MASS_TOL:
        raise InfeasibleMarginals(f"total masses differ: {a.sum()!r} vs {b.sum()!r}")
    return Histogram(a), Histogram(b * (a.sum() / b.sum()))


def solve_linear_ot(M, a, b, max_iter: int | None = None) -> OtSolution:
    """Solve ``min_{P in Pi(a, b)} <P, M>`` exactly.

    Parameters
    ----------
    M : array-like, shape (n, m)
        Finite cost matrix.
    a, b : array-like or Histogram
        Source and target masses; a total-mass mismatch below ``1e-9`` is
        repaired by rescaling ``b``.
    max_iter : int, optional
        Pivot budget. A solve that runs out emits a ``RuntimeWarning`` and
        returns the last feasible vertex.

    Returns
    -------
    OtSolution

    Examples
    --------
    >>> sol = solve_linear_ot([[1, 2], [3, 1]], [.5, .5], [.5, .5])
    >>> sol.cost
    1.0
    """
    M = np.ascontiguousarray(M, dtype=np.float64)
    a, b = _check_histograms(
        a.weights if isinstance(a, Histogram) else a,
        b.weights if isinstance(b, Histogram) else b,
    )
    n, m = len(a), len(b)
    if M.shape != (n, m):
        raise DimensionMismatch(f"cost shape {M.shape} does not match histograms ({n}, {m})")
    if not np.all(np.isfinite(M)):
        raise NonFiniteCost("cost matrix contains NaN or infinite entries")
    if max_iter is None:
        max_iter = max(100_000, 50 * n * m)
    scale = np.abs(M).max()
    tol = 1e-12 * scale
    bi, bj, bx, u, v, it, status = transport_simplex(M, a.weights, b.weights, max_iter, tol)
    P = np.zeros((n, m))
    P[bi, bj] = bx
    if status != STATUS_OPTIMAL:
        warnings.warn(f"transport simplex stopped after {it} pivots", RuntimeWarning, stacklevel=2)
    return OtSolution(
        coupling=Coupling(P, a, b),
        cost=float(bx @ M[bi, bj]),
        iterations=int(it),
        dual_source=u,
        dual_target=v,
        converged=status == STATUS_OPTIMAL,
    )


def wasserstein_distance(src: StructuredObject, dst: StructuredObject, p: int = 1) -> float:
    """p-Wasserstein distance between the feature distributions of two objects.

    Structures are ignored; the ground cost is ``||a_i - b_j||_2 ** p``.
    """
    check_structured_object(src, "src")
    check_structured_object(dst, "dst")
    M = feature_cost_matrix(src, dst, p)
    cost = solve_linear_ot(M, src.weights, dst.weights).cost
    return max(cost, 0.0) ** (1.0 / p)
