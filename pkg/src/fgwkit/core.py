"""Data model shared by the solvers: histograms, structured objects, couplings."""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import (
    DimensionMismatch,
    InvalidHistogram,
    InvalidParameter,
    InvalidStructuredObject,
    MarginalMismatch,
    StructureWarning,
)

SYMMETRY_RTOL = 1e-12
TRIANGLE_TOL = 1e-9
MARGINAL_ATOL = 1e-9


def _frozen(a):
    a.setflags(write=False)
    return a


def _normalize(w):
    # leave already-normalized vectors untouched so that re-reading is exact
    s = w.sum()
    if abs(s - 1.0) <= w.size * np.finfo(np.float64).eps:
        return w
    return w / s


class Histogram:
    """Strictly positive probability vector.

    Any positive vector is accepted and renormalized to sum to one.

    Parameters
    ----------
    weights : array-like, shape (n,)
        Positive, finite masses.

    Examples
    --------
    >>> Histogram([1, 3]).weights
    array([0.25, 0.75])
    """

    __slots__ = ("_w",)

    def __init__(self, weights):
        if isinstance(weights, Histogram):
            self._w = weights._w
            return
        w = np.array(weights, dtype=np.float64).reshape(-1)
        if w.size == 0:
            raise InvalidHistogram("histogram must have at least one bin")
        if not np.all(np.isfinite(w)):
            raise InvalidHistogram("histogram has non-finite entries")
        bad = np.flatnonzero(w <= 0)
        if bad.size:
            raise InvalidHistogram(f"histogram has nonpositive entries at {bad.tolist()}")
        self._w = _frozen(_normalize(w))

    @classmethod
    def uniform(cls, n: int) -> "Histogram":
        return cls(np.full(n, 1.0 / n))

    @property
    def weights(self) -> np.ndarray:
        return self._w

    def __len__(self):
        return self._w.size

    def __array__(self, dtype=None, copy=None):
        return self._w if dtype is None else self._w.astype(dtype)

    def __eq__(self, other):
        return isinstance(other, Histogram) and np.array_equal(self._w, other._w)

    def __hash__(self):
        return hash(self._w.tobytes())

    def __repr__(self):
        return f"Histogram({np.array2string(self._w, precision=4, threshold=8)})"


@dataclass(frozen=True)
class Violation:
    """One broken invariant of a structured object.

    ``code`` is machine readable (``"AsymmetricStructure"``, ``"ZeroWeight"`` ...),
    ``indices`` locates the offending entries and ``severity`` is ``"error"``
    or ``"warning"``.
    """

    code: str
    indices: tuple = ()
    severity: str = "error"
    detail: str = ""

    def __str__(self):
        idx = ",".join(map(str, self.indices))
        s = f"{self.code}({idx})"
        return f"{s}: {self.detail}" if self.detail else s


@dataclass(frozen=True, eq=False)
class StructuredObject:
    """Finite structured object: structure matrix, node features and node weights.

    Parameters
    ----------
    structure : array-like, shape (n, n)
        Pairwise structure distances ``C``.
    features : array-like, shape (n, d) or (n,)
        Node features ``a_i``; a 1D array is read as ``d = 1``.
    weights : array-like or Histogram, shape (n,), optional
        Node masses; uniform when omitted. Renormalized to sum to one.

    Notes
    -----
    Only shapes are enforced at construction; value-level invariants
    (symmetry, zero diagonal, positive weights, triangle inequality) are
    reported by :func:`validate` and enforced by the solvers.
    """

    structure: np.ndarray
    features: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        C = np.array(self.structure, dtype=np.float64)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise DimensionMismatch(f"structure must be square, got shape {C.shape}")
        n = C.shape[0]
        if n == 0:
            raise DimensionMismatch("structured object must have at least one node")
        F = np.array(self.features, dtype=np.float64)
        if F.ndim == 1:
            F = F[:, None]
        if F.ndim != 2 or F.shape[0] != n:
            raise DimensionMismatch(f"features must have {n} rows, got shape {F.shape}")
        if self.weights is None:
            h = np.full(n, 1.0 / n)
        else:
            h = np.array(np.asarray(self.weights), dtype=np.float64).reshape(-1)
            if h.size != n:
                raise DimensionMismatch(f"weights must have length {n}, got {h.size}")
            s = h.sum()
            if np.isfinite(s) and s > 0:
                h = _normalize(h)
        object.__setattr__(self, "structure", _frozen(C))
        object.__setattr__(self, "features", _frozen(F))
        object.__setattr__(self, "weights", _frozen(h))

    @property
    def n(self) -> int:
        return self.structure.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def histogram(self) -> Histogram:
        return Histogram(self.weights)

    @cached_property
    def violations(self) -> tuple:
        return tuple(_find_violations(self))

    def permute(self, perm) -> "StructuredObject":
        """Relabel nodes: node ``k`` of the result is node ``perm[k]`` of ``self``."""
        perm = np.asarray(perm)
        return StructuredObject(
            self.structure[np.ix_(perm, perm)], self.features[perm], self.weights[perm]
        )

    def __eq__(self, other):
        if not isinstance(other, StructuredObject):
            return NotImplemented
        return (
            np.array_equal(self.structure, other.structure)
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def __repr__(self):
        return f"StructuredObject(n={self.n}, d={self.d})"


def _find_violations(obj: StructuredObject):
    C, F, h = obj.structure, obj.features, obj.weights
    out = []
    if not np.all(np.isfinite(C)):
        i, j = np.argwhere(~np.isfinite(C))[0]
        out.append(Violation("NonFiniteStructure", (int(i), int(j))))
        return out
    if not np.all(np.isfinite(F)):
        out.append(Violation("NonFiniteFeatures", (int(np.argwhere(~np.isfinite(F))[0][0]),)))
    scale = np.abs(C).max()
    asym = np.abs(C - C.T) > SYMMETRY_RTOL * scale
    for i, j in np.argwhere(np.triu(asym)):
        out.append(Violation("AsymmetricStructure", (int(i), int(j))))
    for i in np.flatnonzero(np.diag(C) != 0):
        out.append(Violation("NonZeroDiagonal", (int(i),)))
    if (C < 0).any():
        i, j = np.argwhere(C < 0)[0]
        out.append(Violation("NegativeStructure", (int(i), int(j))))
    for i in np.flatnonzero(~(h > 0)):
        out.append(Violation("ZeroWeight", (int(i),)))
    tri = _triangle_violation(C)
    if tri is not None:
        out.append(Violation("TriangleInequality", tri, severity="warning",
                             detail="structure is not a metric"))
    return out


def _triangle_violation(C, tol=TRIANGLE_TOL):
    # first (i, j, k) with C[i, j] > C[i, k] + C[k, j] + tol, or None
    for k in range(C.shape[0]):
        bad = C > C[:, k, None] + C[None, k, :] + tol
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return (int(i), int(j), k)
    return None


def validate(obj: StructuredObject) -> list:
    """List every invariant violated by ``obj``; empty iff the object is valid.

    Examples
    --------
    >>> C = [[0, 1], [2, 0]]
    >>> [v.code for v in validate(StructuredObject(C, [0, 0]))]
    ['AsymmetricStructure']
    """
    return list(obj.violations)


def check_structured_object(obj, name="object") -> StructuredObject:
    """Raise on hard violations, warn on a non-metric structure, return ``obj``."""
    if not isinstance(obj, StructuredObject):
        raise TypeError(f"{name} must be a StructuredObject, got {type(obj).__name__}")
    errors = [v for v in obj.violations if v.severity == "error"]
    if errors:
        raise InvalidStructuredObject(errors)
    for v in obj.violations:
        warnings.warn(f"{name}: {v}", StructureWarning, stacklevel=3)
    return obj


class Coupling:
    """Nonnegative ``n x m`` matrix whose marginals are ``source`` and ``target``.

    Entries in ``[-1e-12, 0)`` are clipped to zero; anything more negative, or
    marginals off by more than ``atol``, raises :class:`MarginalMismatch`.
    """

    __slots__ = ("matrix", "source", "target")

    def __init__(self, matrix, source, target, atol: float = MARGINAL_ATOL):
        P = np.array(matrix, dtype=np.float64)
        a, b = Histogram(source), Histogram(target)
        if P.shape != (len(a), len(b)):
            raise DimensionMismatch(f"coupling shape {P.shape} != ({len(a)}, {len(b)})")
        if not np.all(np.isfinite(P)) or P.min() < -1e-12:
            raise MarginalMismatch("coupling has negative or non-finite entries")
        np.maximum(P, 0.0, out=P)
        err_r = np.abs(P.sum(1) - a.weights).max()
        err_c = np.abs(P.sum(0) - b.weights).max()
        if err_r > atol or err_c > atol:
            raise MarginalMismatch(
                f"coupling marginals off by {max(err_r, err_c):.3g} (tolerance {atol:g})"
            )
        self.matrix = _frozen(P)
        self.source = a
        self.target = b

    @classmethod
    def product(cls, source, target) -> "Coupling":
        a, b = Histogram(source), Histogram(target)
        return cls(np.outer(a.weights, b.weights), a, b)

    @property
    def shape(self):
        return self.matrix.shape

    def nnz(self, tol: float = 0.0) -> int:
        return int(np.count_nonzero(self.matrix > tol))

    @property
    def T(self) -> "Coupling":
        return Coupling(self.matrix.T, self.target, self.source)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        return f"Coupling(shape={self.shape}, nnz={self.nnz()})"


@dataclass(frozen=True)
class SolverParams:
    """Trade-off, exponents, and budgets for the FGW solvers.

    ``alpha`` weighs structure against features, ``p`` is the outer exponent
    and ``q`` the exponent applied to both ground costs.
    """

    alpha: float = 0.5
    p: int = 1
    q: int = 2
    max_iters: int = 1000
    rel_tol: float = 1e-9
    restarts: int = 5
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise InvalidParameter(f"alpha must lie in [0, 1], got {self.alpha}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidParameter(f"{name} must be an integer >= 1, got {v}")
            object.__setattr__(self, name, int(v))
        if not self.rel_tol > 0:
            raise InvalidParameter("rel_tol must be > 0")
        if self.max_iters < 1 or self.restarts < 0:
            raise InvalidParameter("max_iters must be >= 1 and restarts >= 0")
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidParameter("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))

    def replace(self, **changes) -> "SolverParams":
        return dataclasses.replace(self, **changes)


def euclidean_cost(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    """``||a_i - b_j||_2 ** q`` computed from exact coordinate differences."""
    if q == 2:
        return cdist(A, B, "sqeuclidean")
    D = cdist(A, B, "euclidean")
    return D if q == 1 else D**q


def feature_cost_matrix(
    src: StructuredObject,
    dst: StructuredObject,
    q: int = 2,
    metric: Optional[Callable[[np.ndarray, np.ndarray, int], np.ndarray]] = None,
) -> np.ndarray:
    """Feature cost matrix ``M[i, j] = d(a_i, b_j) ** q``.

    Parameters
    ----------
    src, dst : StructuredObject
        Objects sharing the feature dimension ``d``.
    q : int
        Exponent applied to the ground distance.
    metric : callable, optional
        ``metric(A, B, q)`` returning the ``(n, m)`` cost; Euclidean by default.

    Returns
    -------
    M : ndarray, shape (n, m)

    Examples
    --------
    >>> a = StructuredObject([[0]], [0.0]); b = StructuredObject([[0]], [3.0])
    >>> feature_cost_matrix(a, b, q=2)
    array([[9.]])
    """
    if src.d != dst.d:
        raise DimensionMismatch(f"feature dimensions differ: {src.d} vs {dst.d}")
    return (metric or euclidean_cost)(src.features, dst.features, q)
