"""Compiled transportation-simplex kernels.

The solver works on the complete bipartite supply/demand graph and keeps a
spanning-tree basis of ``m + n - 1`` cells (degenerate zero-flow cells
included).  Start is the northwest-corner rule, which is already optimal for
one-dimensional convex costs and close to optimal for histogram features
whose rows are ordered by bin.
"""

import numpy as np
from numba import njit

PIVOT_EPS = 1e-12


@njit(cache=True, nogil=True)
def _link(nbr, deg, a, b):
    nbr[a, deg[a]] = b
    deg[a] += 1
    nbr[b, deg[b]] = a
    deg[b] += 1


@njit(cache=True, nogil=True)
def _unlink(nbr, deg, a, b):
    for k in range(deg[a]):
        if nbr[a, k] == b:
            deg[a] -= 1
            nbr[a, k] = nbr[a, deg[a]]
            break
    for k in range(deg[b]):
        if nbr[b, k] == a:
            deg[b] -= 1
            nbr[b, k] = nbr[b, deg[b]]
            break


@njit(cache=True, nogil=True)
def _potentials(cost, m, nbr, deg, pot, seen, stack):
    """Dual potentials on the basis tree; ``pot[:m]`` rows, ``pot[m:]`` columns."""
    seen[:] = False
    pot[0] = 0.0
    seen[0] = True
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top]
        for k in range(deg[node]):
            other = nbr[node, k]
            if seen[other]:
                continue
            seen[other] = True
            if node < m:
                pot[other] = cost[node, other - m] - pot[node]
            else:
                pot[other] = cost[other, node - m] - pot[node]
            stack[top] = other
            top += 1


@njit(cache=True, nogil=True)
def _tree_path(nbr, deg, start, goal, pred, seen, queue):
    """BFS predecessors over the basis tree from ``start`` until ``goal`` is reached."""
    seen[:] = False
    seen[start] = True
    pred[start] = -1
    queue[0] = start
    head = 0
    tail = 1
    while head < tail:
        node = queue[head]
        head += 1
        if node == goal:
            return
        for k in range(deg[node]):
            other = nbr[node, k]
            if not seen[other]:
                seen[other] = True
                pred[other] = node
                queue[tail] = other
                tail += 1


@njit(cache=True, nogil=True)
def transport_simplex(supply, demand, cost):
    """Solve min <cost, flow> s.t. row sums = supply, column sums = demand.

    Returns ``(flow, objective, pivots)``.  ``supply`` and ``demand`` must be
    nonnegative with equal totals.  Entering cells follow Dantzig's rule
    until ``20 (m + n)`` pivots, then Bland's rule, which cannot cycle.
    """
    m = supply.shape[0]
    n = demand.shape[0]
    nodes = m + n
    flow = np.zeros((m, n))
    basic = np.zeros((m, n), dtype=np.bool_)
    nbr = np.empty((nodes, nodes), dtype=np.int64)
    deg = np.zeros(nodes, dtype=np.int64)

    s = supply.copy()
    d = demand.copy()
    i = 0
    j = 0
    while True:
        x = min(s[i], d[j])
        flow[i, j] = x
        basic[i, j] = True
        _link(nbr, deg, i, m + j)
        s[i] -= x
        d[j] -= x
        if i == m - 1 and j == n - 1:
            break
        if j == n - 1 or (i < m - 1 and s[i] <= d[j]):
            i += 1
        else:
            j += 1

    scale = 1.0
    for a in range(m):
        for b in range(n):
            if cost[a, b] > scale:
                scale = cost[a, b]
    tol = PIVOT_EPS * scale

    pot = np.empty(nodes)
    seen = np.empty(nodes, dtype=np.bool_)
    stack = np.empty(nodes, dtype=np.int64)
    pred = np.empty(nodes, dtype=np.int64)
    path = np.empty(nodes, dtype=np.int64)

    bland_after = 20 * nodes
    rows_per_block = max(1, m // 8)
    row0 = 0
    it = 0
    while m > 1 and n > 1:
        _potentials(cost, m, nbr, deg, pot, seen, stack)
        bland = it >= bland_after
        if bland:
            row0 = 0
        best = -tol
        ei = -1
        ej = -1
        for step in range(m):
            a = (row0 + step) % m
            ua = pot[a]
            for b in range(n):
                r = cost[a, b] - ua - pot[m + b]
                if r < best and not basic[a, b]:
                    best = r
                    ei = a
                    ej = b
                    if bland:
                        break
            if ei >= 0 and (bland or (step + 1) % rows_per_block == 0):
                if not bland:
                    row0 = (a + 1) % m
                break
        if ei < 0:
            break

        _tree_path(nbr, deg, ei, m + ej, pred, seen, stack)
        # path[0] = column ej, ..., path[L] = row ei; odd edges lose flow
        L = 0
        node = m + ej
        path[0] = node
        while node != ei:
            node = pred[node]
            L += 1
            path[L] = node

        theta = np.inf
        li = -1
        lj = -1
        for k in range(1, L + 1, 2):
            a = path[k]
            b = path[k - 1] - m
            f = flow[a, b]
            if f < theta or (f == theta and bland and a * n + b < li * n + lj):
                theta = f
                li = a
                lj = b
        for k in range(1, L + 1):
            if k % 2 == 1:
                flow[path[k], path[k - 1] - m] -= theta
            else:
                flow[path[k - 1], path[k] - m] += theta
        flow[ei, ej] += theta
        flow[li, lj] = 0.0
        basic[li, lj] = False
        _unlink(nbr, deg, li, m + lj)
        basic[ei, ej] = True
        _link(nbr, deg, ei, m + ej)
        it += 1

    total = 0.0
    for a in range(m):
        for b in range(n):
            total += flow[a, b] * cost[a, b]
    return flow, total, it


@njit(cache=True, nogil=True)
def ground_matrix(xa, xb, euclidean):
    m = xa.shape[0]
    n = xb.shape[0]
    q = xa.shape[1]
    out = np.empty((m, n))
    for a in range(m):
        for b in range(n):
            acc = 0.0
            for c in range(q):
                diff = xa[a, c] - xb[b, c]
                if euclidean:
                    acc += diff * diff
                else:
                    acc += abs(diff)
            out[a, b] = np.sqrt(acc) if euclidean else acc
    return out


@njit(cache=True, nogil=True)
def pairwise_emd(offsets, weights, features, left, right, euclidean):
    """EMD for each (left[k], right[k]) pair of support-compressed histograms.

    Frame ``t`` occupies rows ``offsets[t]:offsets[t + 1]`` of ``weights`` and
    ``features``.
    """
    out = np.empty(left.shape[0])
    for k in range(left.shape[0]):
        a = left[k]
        b = right[k]
        wa = weights[offsets[a]:offsets[a + 1]]
        wb = weights[offsets[b]:offsets[b + 1]]
        c = ground_matrix(features[offsets[a]:offsets[a + 1]],
                          features[offsets[b]:offsets[b + 1]], euclidean)
        _, total, _ = transport_simplex(wa, wb, c)
        out[k] = total
    return out
