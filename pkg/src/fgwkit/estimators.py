"""scikit-learn style wrappers around the solvers.

Inputs ``X`` are sequences of :class:`~fgwkit.core.StructuredObject`, not
feature arrays, so these estimators are meant for hand-built pipelines
rather than sklearn's array validation.
"""

from __future__ import annotations

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin

from .barycenter import BarycenterProblem, recover_adjacency, solve_barycenter
from .core import SolverParams
from .exceptions import InvalidParameter
from .fgw import gw_solve, solve_fgw
from .toolkit.mds import mds_embed

MODES = ("w", "gw", "fgw")


def pair_seed(seed: int, i: int, j: int) -> int:
    """Deterministic seed for the unordered pair ``{i, j}``."""
    i, j = min(i, j), max(i, j)
    return int(np.random.SeedSequence([int(seed), i, j]).generate_state(1)[0])


def fgw_distance(src, dst, params: SolverParams, mode: str = "fgw") -> float:
    """FGW distance in one of three modes.

    ``"w"`` sets ``alpha = 0`` (features only), ``"gw"`` ignores features and
    ``"fgw"`` uses ``params.alpha`` as is.
    """
    if mode == "w":
        return solve_fgw(src, dst, params.replace(alpha=0.0)).value
    if mode == "gw":
        return gw_solve(src, dst, params).value
    if mode == "fgw":
        return solve_fgw(src, dst, params).value
    raise InvalidParameter(f"mode must be one of {MODES}, got {mode!r}")


def _pair(objs_a, objs_b, i, j, params, mode):
    return fgw_distance(objs_a[i], objs_b[j], params.replace(seed=pair_seed(params.seed, i, j)), mode)


def pairwise_fgw(X, Y=None, params: SolverParams | None = None, mode: str = "fgw",
                 n_jobs: int = 1) -> np.ndarray:
    """Distance matrix between two collections of structured objects.

    With ``Y=None`` only the upper triangle is solved and mirrored, so the
    result is exactly symmetric with a zero diagonal.  Pair ``(i, j)`` is
    solved with seed ``pair_seed(params.seed, i, j)``, which makes the
    output independent of ``n_jobs``.
    """
    params = params or SolverParams()
    X = list(X)
    if Y is None:
        n = len(X)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        vals = Parallel(n_jobs=n_jobs)(delayed(_pair)(X, X, i, j, params, mode) for i, j in pairs)
        D = np.zeros((n, n))
        for (i, j), v in zip(pairs, vals):
            D[i, j] = D[j, i] = v
        return D
    Y = list(Y)
    pairs = [(i, j) for i in range(len(X)) for j in range(len(Y))]
    vals = Parallel(n_jobs=n_jobs)(delayed(_pair)(X, Y, i, j, params, mode) for i, j in pairs)
    return np.array(vals, dtype=float).reshape(len(X), len(Y))


class _ParamsMixin:
    def _params(self):
        return SolverParams(alpha=self.alpha, p=self.p, q=self.q, restarts=self.restarts,
                            seed=self.seed, max_iters=self.max_iters, rel_tol=self.rel_tol)


class FGWDistance(_ParamsMixin, BaseEstimator, TransformerMixin):
    """Represent structured objects by their distances to a reference set.

    Parameters
    ----------
    alpha, p, q, restarts, seed, max_iters, rel_tol
        Solver settings, see :class:`~fgwkit.core.SolverParams`.
    mode : {"fgw", "w", "gw"}
    n_jobs : int
        Pairs solved in parallel.

    Attributes
    ----------
    reference_ : list of StructuredObject
    """

    def __init__(self, alpha=0.5, p=1, q=2, restarts=5, seed=0, max_iters=1000,
                 rel_tol=1e-9, mode="fgw", n_jobs=1):
        self.alpha = alpha
        self.p = p
        self.q = q
        self.restarts = restarts
        self.seed = seed
        self.max_iters = max_iters
        self.rel_tol = rel_tol
        self.mode = mode
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        self.reference_ = list(X)
        return self

    def transform(self, X):
        return pairwise_fgw(X, self.reference_, self._params(), self.mode, self.n_jobs)

    def fit_transform(self, X, y=None):
        self.fit(X)
        return pairwise_fgw(self.reference_, None, self._params(), self.mode, self.n_jobs)


class FGWBarycenter(_ParamsMixin, BaseEstimator):
    """FGW barycenter of a collection; ``predict`` maps nodes onto it.

    Parameters
    ----------
    n_nodes : int
        Size of the barycenter.
    lambdas : array-like, optional
        Barycentric weights, uniform by default.
    alpha, q, restarts, seed, max_iters, rel_tol
        Solver settings; ``p`` is fixed to 1.

    Attributes
    ----------
    barycenter_ : StructuredObject
    couplings_ : tuple of Coupling
    objective_trace_ : tuple of float
    """

    p = 1

    def __init__(self, n_nodes=10, lambdas=None, alpha=0.5, q=2, restarts=5, seed=0,
                 max_iters=1000, rel_tol=1e-9):
        self.n_nodes = n_nodes
        self.lambdas = lambdas
        self.alpha = alpha
        self.q = q
        self.restarts = restarts
        self.seed = seed
        self.max_iters = max_iters
        self.rel_tol = rel_tol

    def fit(self, X, y=None):
        sol = solve_barycenter(BarycenterProblem(list(X), self.lambdas, self.n_nodes,
                                                 params=self._params()))
        self.solution_ = sol
        self.barycenter_ = sol.barycenter
        self.couplings_ = sol.couplings
        self.objective_trace_ = sol.objective_trace
        return self

    def predict(self, X):
        """Barycenter node receiving most mass from each node of every object in ``X``."""
        params = self._params()
        return [np.argmax(solve_fgw(x, self.barycenter_, params).coupling.matrix, axis=1)
                for x in X]

    def recover_graph(self):
        """Adjacency matrix obtained by thresholding the barycenter structure."""
        return recover_adjacency(self.barycenter_.structure)[0]


class ClassicalMDS(BaseEstimator, TransformerMixin):
    """Classical (Torgerson) MDS on a precomputed distance matrix.

    Attributes
    ----------
    embedding_ : ndarray, shape (n, n_components)
    """

    def __init__(self, n_components=2):
        self.n_components = n_components

    def fit(self, D, y=None):
        self.embedding_ = mds_embed(D, self.n_components)
        return self

    def fit_transform(self, D, y=None):
        return self.fit(D).embedding_
