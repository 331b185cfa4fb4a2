"""numba kernels for contracting the FGW cost tensor with a coupling.

The tensor is ``K[i, j, k, l] = (wf * M[i, j] + ws * |C1[i, k] - C2[j, l]| ** q) ** p``
and is never materialized.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _gap(x, y, q):
    d = abs(x - y)
    if q == 1:
        return d
    if q == 2:
        return d * d
    return d**q


@njit(cache=True, inline="always")
def _cost(f, s, p):
    c = f + s
    if p == 1:
        return c
    if p == 2:
        return c * c
    return c**p


@njit(cache=True)
def contract(C1, C2, M, wf, ws, p, q, rows, cols, vals, transpose):
    """Sparse contraction over the support ``(rows, cols, vals)`` of a coupling.

    ``transpose=False`` gives ``sum_{k,l} K[i, j, k, l] P[k, l]``,
    ``transpose=True`` gives ``sum_{k,l} K[k, l, i, j] P[k, l]``.
    Cost is ``O(nnz * n * m)``.
    """
    n = C1.shape[0]
    m = C2.shape[0]
    out = np.zeros((n, m))
    for s in range(rows.size):
        k = rows[s]
        l = cols[s]
        w = vals[s]
        if w == 0.0:
            continue
        # both structures are read along row k / l; for the transposed
        # tensor the roles of (i, j) and (k, l) swap in the structure gap,
        # and for symmetric inputs C[i, k] == C[k, i]
        for i in range(n):
            c1 = C1[k, i] if transpose else C1[i, k]
            for j in range(m):
                c2 = C2[l, j] if transpose else C2[j, l]
                f = wf * (M[k, l] if transpose else M[i, j])
                out[i, j] += w * _cost(f, ws * _gap(c1, c2, q), p)
    return out


@njit(cache=True)
def energy_dense(C1, C2, M, wf, ws, p, q, P):
    """``sum_{i,j,k,l} K[i, j, k, l] P[i, j] P[k, l]`` by explicit summation."""
    n, m = P.shape
    total = 0.0
    for i in range(n):
        for j in range(m):
            pij = P[i, j]
            if pij == 0.0:
                continue
            f = wf * M[i, j]
            acc = 0.0
            for k in range(n):
                c1 = C1[i, k]
                for l in range(m):
                    pkl = P[k, l]
                    if pkl != 0.0:
                        acc += _cost(f, ws * _gap(c1, C2[j, l], q), p) * pkl
            total += pij * acc
    return total


@njit(cache=True)
def product_gap_q1(C1, C2, h, g):
    """``sum_{k,l} |C1[i, k] - C2[j, l]| h[k] g[l]`` for every ``(i, j)``.

    Each entry is the mean absolute difference of two discrete laws and is
    computed by a merge over sorted supports in ``O(n + m)``.
    """
    n = C1.shape[0]
    m = C2.shape[0]
    xs = np.empty((n, n))
    xw = np.empty((n, n))
    for i in range(n):
        o = np.argsort(C1[i], kind="mergesort")
        for t in range(n):
            xs[i, t] = C1[i, o[t]]
            xw[i, t] = h[o[t]]
    ys = np.empty((m, m))
    yw = np.empty((m, m))
    ycw = np.empty((m, m + 1))
    ycs = np.empty((m, m + 1))
    for j in range(m):
        o = np.argsort(C2[j], kind="mergesort")
        ycw[j, 0] = 0.0
        ycs[j, 0] = 0.0
        for t in range(m):
            ys[j, t] = C2[j, o[t]]
            yw[j, t] = g[o[t]]
            ycw[j, t + 1] = ycw[j, t] + yw[j, t]
            ycs[j, t + 1] = ycs[j, t] + yw[j, t] * ys[j, t]
    out = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            gtot = ycw[j, m]
            stot = ycs[j, m]
            acc = 0.0
            t = 0
            for s in range(n):
                x = xs[i, s]
                while t < m and ys[j, t] <= x:
                    t += 1
                # y below x contribute x - y, above contribute y - x
                below_w = ycw[j, t]
                below_s = ycs[j, t]
                acc += xw[i, s] * (
                    x * below_w - below_s + (stot - below_s) - x * (gtot - below_w)
                )
            out[i, j] = acc
    return out
