"""FGW barycenters by block-coordinate descent, and graph recovery by thresholding."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import Coupling, Histogram, SolverParams, StructuredObject, check_structured_object, euclidean_cost
from .exceptions import DimensionMismatch, EmptyCandidateSet, IncompatibleQ, InvalidParameter
from .fgw import _Problem, _solve
from .toolkit.datasets import random_connected_graph_structure
from .toolkit.graph import shortest_path_matrix

MAX_OUTER = 50
OUTER_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class BarycenterProblem:
    """Weighted FGW Frechet mean of ``inputs`` on ``target_size`` nodes.

    The barycenter histogram ``target_weights`` is fixed (uniform by
    default).  ``fixed_structure`` / ``fixed_features`` freeze the
    corresponding block; ``init_structure`` / ``init_features`` replace the
    seeded random starting point.  ``params.p`` must be 1.
    """

    inputs: Sequence[StructuredObject]
    lambdas: Optional[Sequence[float]] = None
    target_size: int = 0
    target_weights: Optional[np.ndarray] = None
    params: SolverParams = field(default_factory=lambda: SolverParams(alpha=0.5, q=2))
    fixed_structure: Optional[np.ndarray] = None
    fixed_features: Optional[np.ndarray] = None
    init_structure: Optional[np.ndarray] = None
    init_features: Optional[np.ndarray] = None
    max_outer: int = MAX_OUTER
    outer_tol: float = OUTER_TOL
    numerical_fallback: bool = False

    def __post_init__(self):
        inputs = tuple(self.inputs)
        if not inputs:
            raise InvalidParameter("at least one input object is required")
        for k, obj in enumerate(inputs):
            check_structured_object(obj, f"inputs[{k}]")
        d = {obj.d for obj in inputs}
        if len(d) > 1:
            raise DimensionMismatch(f"inputs have different feature dimensions {sorted(d)}")
        K = len(inputs)
        lam = np.full(K, 1.0 / K) if self.lambdas is None else np.asarray(self.lambdas, float)
        if lam.shape != (K,) or np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-12:
            raise InvalidParameter("lambdas must be K nonnegative numbers summing to 1")
        N = int(self.target_size) or inputs[0].n
        h = Histogram.uniform(N) if self.target_weights is None else Histogram(self.target_weights)
        if len(h) != N:
            raise DimensionMismatch(f"target_weights must have length {N}")
        if self.params.p != 1:
            raise InvalidParameter("barycenters are defined for p = 1")
        if self.params.q != 2 and not self.numerical_fallback:
            raise IncompatibleQ(
                f"closed-form barycenter updates need q = 2 (got {self.params.q}); "
                "set numerical_fallback=True to use gradient steps"
            )
        if self.fixed_structure is not None:
            Cf = np.asarray(self.fixed_structure, dtype=float)
            if Cf.shape != (N, N):
                raise DimensionMismatch(f"fixed_structure must be {N}x{N}")
            check_structured_object(StructuredObject(Cf, np.zeros(N)), "fixed_structure")
            object.__setattr__(self, "fixed_structure", Cf)
        if self.fixed_features is not None:
            Af = np.asarray(self.fixed_features, dtype=float).reshape(N, -1)
            if Af.shape[1] != inputs[0].d:
                raise DimensionMismatch("fixed_features has the wrong feature dimension")
            object.__setattr__(self, "fixed_features", Af)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "target_size", N)
        object.__setattr__(self, "target_weights", h.weights)


@dataclass(frozen=True, eq=False)
class BarycenterSolution:
    """Barycenter, its couplings to every input (``N x n_k``) and the objective per sweep."""

    barycenter: StructuredObject
    couplings: tuple
    objective_trace: tuple
    converged: bool

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]

    def assignments(self, k: int) -> np.ndarray:
        """Barycenter node receiving most of the mass of each node of input ``k``."""
        return np.argmax(self.couplings[k].matrix, axis=0)


def _energy(C, A, h, obj, P, params):
    M = euclidean_cost(A, obj.features, params.q)
    prob = _Problem(M, C, obj.structure, h, obj.weights, params.alpha, 1, params.q)
    return prob.exact_energy(P)


def _total(C, A, h, inputs, lam, Ps, params):
    return float(sum(l * _energy(C, A, h, o, P, params) for l, o, P in zip(lam, inputs, Ps)))


def update_structure(h, lambdas, couplings, structures) -> np.ndarray:
    """Closed-form minimiser in ``C`` for the square loss, symmetrised, zero diagonal."""
    C = sum(l * (P @ Ck @ P.T) for l, P, Ck in zip(lambdas, couplings, structures))
    C = C / np.outer(h, h)
    C = 0.5 * (C + C.T)
    np.fill_diagonal(C, 0.0)
    return C


def update_features(h, lambdas, couplings, features) -> np.ndarray:
    """Closed-form minimiser in ``A`` for the squared Euclidean feature cost."""
    return sum(l * (P @ B) for l, P, B in zip(lambdas, couplings, features)) / h[:, None]


def _numerical_step(C, A, h, prob, Ps, fix_C, fix_A, steps=20):
    # gradient descent with step halving on (C, A) for q != 2
    q, alpha = prob.params.q, prob.params.alpha
    inputs, lam = prob.inputs, prob.lambdas
    f0 = _total(C, A, h, inputs, lam, Ps, prob.params)
    for _ in range(steps):
        gC = np.zeros_like(C)
        gA = np.zeros_like(A)
        for l, o, P in zip(lam, inputs, Ps):
            D = C[:, None, :, None] - o.structure[None, :, None, :]
            W = P[:, :, None, None] * P[None, None, :, :]
            gC += l * alpha * 2 * q * np.einsum("ijkl,ijkl->ik", np.sign(D) * np.abs(D) ** (q - 1), W)
            diff = A[:, None, :] - o.features[None, :, :]
            nrm = np.sqrt((diff**2).sum(-1))
            coef = q * np.where(nrm > 0, nrm, 1.0) ** (q - 2) * (nrm > 0)
            gA += l * (1 - alpha) * np.einsum("ij,ijd->id", P * coef, diff)
        if fix_C:
            gC[:] = 0
        if fix_A:
            gA[:] = 0
        step = 1.0
        improved = False
        while step > 1e-12:
            C1 = C - step * gC
            C1 = np.maximum(0.5 * (C1 + C1.T), 0.0)
            np.fill_diagonal(C1, 0.0)
            A1 = A - step * gA
            f1 = _total(C1, A1, h, inputs, lam, Ps, prob.params)
            if f1 < f0:
                C, A, f0, improved = C1, A1, f1, True
                break
            step *= 0.5
        if not improved:
            break
    return C, A


def solve_barycenter(problem: BarycenterProblem) -> BarycenterSolution:
    """Block-coordinate descent on couplings, structure and features.

    Each sweep (1) re-solves every coupling with the barycenter fixed,
    from the usual starts plus the previous coupling, (2) sets the structure to its
    closed-form minimiser, (3) sets the features to theirs.  Every block
    step is a minimisation, so the recorded objective never increases.

    When exactly one block is fixed, the first coupling step uses that block
    alone (``alpha`` of 1 or 0) since the other one is still a random guess.
    """
    pr = problem
    params = pr.params
    N, h, lam, inputs = pr.target_size, pr.target_weights, pr.lambdas, pr.inputs
    rng = np.random.default_rng(params.seed)
    if pr.fixed_structure is not None:
        C = pr.fixed_structure.copy()
    elif pr.init_structure is not None:
        C = np.array(pr.init_structure, dtype=float).reshape(N, N)
    else:
        C = random_connected_graph_structure(N, rng)
    if pr.fixed_features is not None:
        A = pr.fixed_features.copy()
    elif pr.init_features is not None:
        A = np.array(pr.init_features, dtype=float).reshape(N, -1)
    else:
        pool = np.vstack([o.features for o in inputs])
        # canonical row order so that the start does not depend on input order
        pool = pool[np.lexsort(pool.T[::-1])]
        A = pool[rng.choice(len(pool), size=N, replace=N > len(pool))]

    # the first coupling step ignores a block that is still a random guess
    first_alpha = params.alpha
    if pr.fixed_structure is not None and pr.fixed_features is None:
        first_alpha = 1.0
    elif pr.fixed_features is not None and pr.fixed_structure is None:
        first_alpha = 0.0

    Ps = [None] * len(inputs)
    trace = []
    converged = False
    for it in range(pr.max_outer):
        for k, o in enumerate(inputs):
            M = euclidean_cost(A, o.features, params.q)
            if Ps[k] is None:
                sol = _solve(M, C, o.structure, h, o.weights, params.replace(alpha=first_alpha))
            else:
                sol = _solve(M, C, o.structure, h, o.weights, params, init=[Ps[k]])
            Ps[k] = sol.coupling.matrix
        if params.q == 2:
            if pr.fixed_structure is None:
                C = update_structure(h, lam, Ps, [o.structure for o in inputs])
            if pr.fixed_features is None:
                A = update_features(h, lam, Ps, [o.features for o in inputs])
        else:
            C, A = _numerical_step(C, A, h, pr, Ps, pr.fixed_structure is not None,
                                   pr.fixed_features is not None)
        f = _total(C, A, h, inputs, lam, Ps, params)
        trace.append(f)
        if it > 0 and trace[-2] - f <= pr.outer_tol * abs(f):
            converged = True
            break
        if f == 0.0:
            converged = True
            break
    bary = StructuredObject(C, A, h)
    couplings = tuple(Coupling(P, h, o.weights) for P, o in zip(Ps, inputs))
    return BarycenterSolution(bary, couplings, tuple(trace), converged)


def recover_adjacency(C, reference_metric: str = "shortest_path"):
    """Threshold a barycenter structure into a graph.

    Every distinct off-diagonal value of ``C`` is tried as a threshold; the
    graph with an edge wherever ``C <= threshold`` is scored by the Frobenius
    distance between ``C`` and its unit-weight shortest-path matrix
    (unreachable pairs count as distance ``N``).  The best threshold wins,
    ties going to the smaller one.

    Returns
    -------
    adjacency : ndarray of int, shape (N, N)
    threshold : float
    residual : float
    """
    if reference_metric != "shortest_path":
        raise InvalidParameter(f"unknown reference metric {reference_metric!r}")
    C = np.asarray(C, dtype=float)
    N = C.shape[0]
    off = ~np.eye(N, dtype=bool)
    best = None
    for thr in np.unique(C[off]):
        A = ((C <= thr) & off).astype(float)
        if not A.any():
            continue
        SP = shortest_path_matrix(A)
        SP[~np.isfinite(SP)] = N
        res = float(np.linalg.norm(C - SP))
        if best is None or res < best[2]:
            best = (A.astype(int), float(thr), res)
    if best is None:
        raise EmptyCandidateSet("every threshold yields an edgeless graph")
    return best
