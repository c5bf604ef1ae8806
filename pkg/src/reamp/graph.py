"""Similarity graphs over a cost matrix and the edge-crossing count statistic.

Vertices are 0-based frame indices.  A cut ``i`` (``1 <= i <= n - 1``)
separates frames ``0..i-1`` from ``i..n-1``, i.e. time points ``1..i`` from
``i+1..n``; ``CountStatistic.values[i - 1]`` is the count for cut ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .transport import CostMatrix

GRAPH_KINDS = ("shp", "mst")


@dataclass(frozen=True)
class PathGraph:
    kind: str
    edges: np.ndarray  # (n - 1, 2) int array, each row (u, v) with u < v
    total_cost: float
    order: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.edges.shape[0] + 1


@dataclass(frozen=True)
class CountStatistic:
    values: np.ndarray  # S(1), ..., S(n - 1)
    kind: str

    @property
    def n(self) -> int:
        return self.values.shape[0] + 1


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def _values(costs):
    c = costs.values if isinstance(costs, CostMatrix) else np.asarray(costs, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("cost matrix must be square")
    if c.shape[0] < 2:
        raise ValueError("need at least 2 vertices")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix contains non-finite entries")
    if not np.array_equal(c, c.T):
        raise ValueError("cost matrix must be symmetric")
    return c


def _sorted_edges(c):
    """All ``u < v`` pairs ordered by ``(cost, u, v)``."""
    u, v = np.triu_indices(c.shape[0], k=1)
    w = c[u, v]
    key = np.lexsort((v, u, w))
    return u[key], v[key], w[key]


def shortest_hamiltonian_path(costs) -> PathGraph:
    """Greedy degree-constrained Kruskal approximation of the shortest Hamiltonian path.

    Edges are scanned in ascending ``(cost, min endpoint, max endpoint)``
    order and accepted when both endpoints still have degree < 2 and no
    cycle is closed.  The stored vertex order starts from the lower-indexed
    endpoint of the path.
    """
    c = _values(costs)
    n = c.shape[0]
    us, vs, ws = _sorted_edges(c)
    dsu = _DisjointSet(n)
    degree = [0] * n
    edges = []
    total = 0.0
    for u, v, w in zip(us.tolist(), vs.tolist(), ws.tolist()):
        if degree[u] >= 2 or degree[v] >= 2:
            continue
        if not dsu.union(u, v):
            continue
        degree[u] += 1
        degree[v] += 1
        edges.append((u, v))
        total += w
        if len(edges) == n - 1:
            break

    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    start = min(k for k in range(n) if degree[k] == 1)
    order = [start]
    prev = -1
    while len(order) < n:
        cur = order[-1]
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][-1]
        prev = cur
        order.append(nxt)
    return PathGraph("shp", np.array(edges, dtype=np.int64).reshape(-1, 2), total,
                     np.array(order, dtype=np.int64))


def minimum_spanning_tree(costs) -> PathGraph:
    """Kruskal minimum spanning tree with the same edge ordering as the path heuristic."""
    c = _values(costs)
    n = c.shape[0]
    us, vs, ws = _sorted_edges(c)
    dsu = _DisjointSet(n)
    edges = []
    total = 0.0
    for u, v, w in zip(us.tolist(), vs.tolist(), ws.tolist()):
        if dsu.union(u, v):
            edges.append((u, v))
            total += w
            if len(edges) == n - 1:
                break
    return PathGraph("mst", np.array(edges, dtype=np.int64).reshape(-1, 2), total)


def build_graph(costs, kind: str = "shp") -> PathGraph:
    if kind == "shp":
        return shortest_hamiltonian_path(costs)
    if kind == "mst":
        return minimum_spanning_tree(costs)
    raise ValueError(f"unknown graph kind {kind!r}; choose from {GRAPH_KINDS}")


def count_statistic(graph: PathGraph, n: int | None = None) -> CountStatistic:
    """Number of graph edges crossing each cut ``{1..i} | {i+1..n}``."""
    edges = np.asarray(graph.edges)
    n = graph.n if n is None else n
    if edges.shape != (n - 1, 2):
        raise ValueError(f"expected {n - 1} edges over {n} vertices, got {edges.shape[0]}")
    lo = edges.min(axis=1)
    hi = edges.max(axis=1)
    if lo.min() < 0 or hi.max() >= n or np.any(lo == hi):
        raise ValueError("malformed edge list")
    # 0-based edge (lo, hi) crosses cuts lo+1 .. hi
    diff = np.zeros(n + 1, dtype=np.int64)
    np.add.at(diff, lo + 1, 1)
    np.add.at(diff, hi + 1, -1)
    return CountStatistic(np.cumsum(diff)[1:n], graph.kind)


def save_path(path, graph: PathGraph, stat: CountStatistic) -> None:
    """Write the vertex order (1-based) and S(i) as a two-section CSV."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("kind,position,value\n")
        for pos, v in enumerate(graph.order.tolist(), start=1):
            fh.write(f"order,{pos},{v + 1}\n")
        for i, s in enumerate(stat.values.tolist(), start=1):
            fh.write(f"count,{i},{s}\n")
