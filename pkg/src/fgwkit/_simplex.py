"""Transportation simplex on a spanning-tree basis (numba kernel).

Rows ``0..n-1`` and columns ``n..n+m-1`` are the nodes of a bipartite graph;
a basis is a spanning tree of ``n + m - 1`` cells.  Pricing is a block
search (most negative reduced cost within a cyclic block of cells) that
switches to Bland's rule after a run of degenerate pivots.  Every tie, entering or leaving, goes to the lowest
``(row, col)`` in lexicographic order, so the result is a deterministic
function of the inputs.
"""

import numpy as np
from numba import njit

STATUS_OPTIMAL = 0
STATUS_MAX_ITER = 1


@njit(cache=True)
def _matrix_minimum(M, a, b, bi, bj, bx):
    # greedy start: cheapest open cell first, each allocation closes one line
    n, m = a.size, b.size
    ra = a.copy()
    rb = b.copy()
    row_open = np.ones(n, np.bool_)
    col_open = np.ones(m, np.bool_)
    open_rows = n
    open_cols = m
    order = np.argsort(M.ravel(), kind="mergesort")
    k = 0
    for c in order:
        i = c // m
        j = c - i * m
        if not (row_open[i] and col_open[j]):
            continue
        x = min(ra[i], rb[j])
        if x < 0.0:
            x = 0.0
        bi[k] = i
        bj[k] = j
        bx[k] = x
        k += 1
        ra[i] -= x
        rb[j] -= x
        if (ra[i] <= rb[j] and open_rows > 1) or open_cols == 1:
            row_open[i] = False
            open_rows -= 1
        else:
            col_open[j] = False
            open_cols -= 1
        if k == n + m - 1:
            break


@njit(cache=True)
def _build_adjacency(bi, bj, n, m, start, adj_node, adj_edge):
    nn = n + m
    K = bi.size
    for v in range(nn + 1):
        start[v] = 0
    for k in range(K):
        start[bi[k] + 1] += 1
        start[n + bj[k] + 1] += 1
    for v in range(nn):
        start[v + 1] += start[v]
    fill = start[:nn].copy()
    for k in range(K):
        r = bi[k]
        c = n + bj[k]
        adj_node[fill[r]] = c
        adj_edge[fill[r]] = k
        fill[r] += 1
        adj_node[fill[c]] = r
        adj_edge[fill[c]] = k
        fill[c] += 1


@njit(cache=True)
def _potentials(M, bi, bj, n, m, start, adj_node, adj_edge, u, v, queue, seen):
    nn = n + m
    for x in range(nn):
        seen[x] = False
    u[0] = 0.0
    seen[0] = True
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        for s in range(start[x], start[x + 1]):
            y = adj_node[s]
            if seen[y]:
                continue
            k = adj_edge[s]
            c = M[bi[k], bj[k]]
            if y >= n:
                v[y - n] = c - u[x]
            else:
                u[y] = c - v[x - n]
            seen[y] = True
            queue[tail] = y
            tail += 1


@njit(cache=True)
def transport_simplex(M, a, b, max_iter, tol):
    """Solve ``min <P, M>`` over couplings of ``a`` and ``b``.

    Returns ``(bi, bj, bx, u, v, n_iter, status)`` where ``(bi, bj, bx)`` are
    the basic cells and their flows and ``u``, ``v`` the dual potentials.
    """
    n, m = a.size, b.size
    K = n + m - 1
    nn = n + m
    bi = np.empty(K, np.int64)
    bj = np.empty(K, np.int64)
    bx = np.empty(K, np.float64)
    _matrix_minimum(M, a, b, bi, bj, bx)

    u = np.zeros(n)
    v = np.zeros(m)
    start = np.zeros(nn + 1, np.int64)
    adj_node = np.empty(2 * K, np.int64)
    adj_edge = np.empty(2 * K, np.int64)
    queue = np.empty(nn, np.int64)
    seen = np.zeros(nn, np.bool_)
    parent_edge = np.empty(nn, np.int64)
    parent_node = np.empty(nn, np.int64)
    path = np.empty(nn, np.int64)

    N = n * m
    block = max(int(np.sqrt(N)), min(N, 32))
    pos = 0
    degenerate_run = 0
    bland_after = nn
    it = 0
    status = STATUS_MAX_ITER
    while it < max_iter:
        _build_adjacency(bi, bj, n, m, start, adj_node, adj_edge)
        _potentials(M, bi, bj, n, m, start, adj_node, adj_edge, u, v, queue, seen)

        # pricing: block search over cells in cyclic order; Bland scans from 0
        ei = -1
        ej = -1
        best = -tol
        if degenerate_run > bland_after:
            for c in range(N):
                i = c // m
                j = c - i * m
                if M[i, j] - u[i] - v[j] < best:
                    ei = i
                    ej = j
                    break
        else:
            found = -1
            count = 0
            for _ in range(N):
                c = pos
                i = c // m
                j = c - i * m
                r = M[i, j] - u[i] - v[j]
                if r < best or (r == best and found >= 0 and c < found):
                    best = r
                    found = c
                pos += 1
                if pos == N:
                    pos = 0
                count += 1
                if count == block:
                    if found >= 0:
                        break
                    count = 0
            if found >= 0:
                ei = found // m
                ej = found - ei * m
        if ei < 0:
            status = STATUS_OPTIMAL
            break

        # tree path from row node ei to column node n + ej
        for x in range(nn):
            seen[x] = False
        seen[ei] = True
        queue[0] = ei
        head = 0
        tail = 1
        target = n + ej
        while head < tail:
            x = queue[head]
            head += 1
            if x == target:
                break
            for s in range(start[x], start[x + 1]):
                y = adj_node[s]
                if not seen[y]:
                    seen[y] = True
                    parent_edge[y] = adj_edge[s]
                    parent_node[y] = x
                    queue[tail] = y
                    tail += 1
        plen = 0
        x = target
        while x != ei:
            path[plen] = parent_edge[x]
            plen += 1
            x = parent_node[x]

        # edges at even positions (from the column end) lose flow
        leave = -1
        theta = np.inf
        for s in range(0, plen, 2):
            k = path[s]
            xk = bx[k]
            if xk < theta or (
                xk == theta
                and (bi[k] < bi[leave] or (bi[k] == bi[leave] and bj[k] < bj[leave]))
            ):
                theta = xk
                leave = k
        if theta < 0.0:
            theta = 0.0
        for s in range(plen):
            k = path[s]
            if s % 2 == 0:
                bx[k] -= theta
            else:
                bx[k] += theta
        bi[leave] = ei
        bj[leave] = ej
        bx[leave] = theta
        if theta > 0.0:
            degenerate_run = 0
        else:
            degenerate_run += 1
        it += 1

    if status != STATUS_OPTIMAL:
        _build_adjacency(bi, bj, n, m, start, adj_node, adj_edge)
        _potentials(M, bi, bj, n, m, start, adj_node, adj_edge, u, v, queue, seen)
    for k in range(K):
        if bx[k] < 0.0:
            bx[k] = 0.0
    return bi, bj, bx, u, v, it, status
