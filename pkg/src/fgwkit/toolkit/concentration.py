"""Empirical convergence rate of FGW between samples and a reference measure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from ..core import SolverParams, StructuredObject
from ..fgw import solve_fgw

REFERENCE_SIZE = 512


def default_feature(X: np.ndarray) -> np.ndarray:
    return np.sin(2 * np.pi * X[:, 0]) * np.cos(np.pi * X[:, 1])


def uniform_square_sampler(n: int, rng) -> np.ndarray:
    return rng.random((n, 2))


def reference_grid(size: int) -> np.ndarray:
    """Cell-centred ``k x k`` grid on the unit square with ``k*k >= size``."""
    k = int(np.ceil(np.sqrt(size)))
    c = (np.arange(k) + 0.5) / k
    return np.array([(x, y) for x in c for y in c])


def positions_to_object(X: np.ndarray, feature: Callable = default_feature) -> StructuredObject:
    """Euclidean structure on the positions, ``feature(X)`` as node features."""
    return StructuredObject(cdist(X, X), feature(X))


@dataclass(frozen=True)
class ConcentrationResult:
    sizes: tuple
    means: tuple
    stds: tuple
    slope: float
    slope_stderr: float
    intercept: float
    reference_size: int


def fit_loglog(sizes, means):
    """Least-squares slope (with standard error) of ``log(mean)`` against ``log(n)``."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    A = np.c_[x, np.ones_like(x)]
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = max(len(x) - 2, 1)
    s2 = resid @ resid / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    return float(coef[0]), float(np.sqrt(cov[0, 0])), float(coef[1])


def concentration_experiment(
    sizes: Sequence[int] = (8, 16, 32, 64, 128),
    trials: int = 20,
    seed: int = 0,
    reference_size: int = REFERENCE_SIZE,
    sampler: Optional[Callable] = None,
    feature: Callable = default_feature,
    params: Optional[SolverParams] = None,
    reference: Optional[np.ndarray] = None,
) -> ConcentrationResult:
    """Mean FGW between ``n``-point empirical objects and a fine reference.

    For each ``n`` in ``sizes``, ``trials`` objects of ``n`` i.i.d. positions
    are drawn from ``sampler`` (uniform on the unit square by default) and
    compared with the reference discretisation (a grid of at least
    ``reference_size`` points) using FGW with ``alpha=0.5, p=1, q=1``.  The
    slope of ``log(mean)`` against ``log(n)`` is then fitted.

    Returns
    -------
    ConcentrationResult
    """
    sampler = sampler or uniform_square_sampler
    params = params or SolverParams(alpha=0.5, p=1, q=1, restarts=0, rel_tol=1e-7)
    rng = np.random.default_rng(seed)
    ref_pos = reference_grid(reference_size) if reference is None else np.asarray(reference)
    ref = positions_to_object(ref_pos, feature)
    means, stds = [], []
    for n in sizes:
        vals = []
        for _ in range(trials):
            obj = positions_to_object(sampler(int(n), rng), feature)
            vals.append(solve_fgw(obj, ref, params).value)
        means.append(float(np.mean(vals)))
        stds.append(float(np.std(vals)))
    slope, se, icpt = fit_loglog(sizes, means)
    return ConcentrationResult(tuple(int(n) for n in sizes), tuple(means), tuple(stds),
                               slope, se, icpt, len(ref_pos))
