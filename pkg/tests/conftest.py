"""Shared test oracles, implemented independently of the library.

Everything here takes the dumbest correct route: dense matrices, dict-based
BFS, plain union-find. Slow on purpose; these define ground truth for the
library's optimized paths.
"""

from collections import deque

import numpy as np


def brute_triangles(n, edges):
    """O(n^3) triangle counts via adjacency-matrix powers.

    Returns (total, per_node list). diag(A^3) counts closed walks of length
    3 from each node: twice its triangle count (one per orientation).
    """
    a = np.zeros((n, n), dtype=np.int64)
    for u, v in edges:
        a[u, v] = 1
        a[v, u] = 1
    a3 = a @ a @ a
    per = np.diag(a3) // 2
    return int(per.sum()) // 3, per.tolist()


def adjacency_dict(n, edges):
    adj = {i: [] for i in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()
    return adj


def bfs_dict(adj, source):
    """Plain queue BFS; returns {node: distance} for reached nodes."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def all_pairs_bfs(n, edges):
    """Distance dict per node, the exhaustive way."""
    adj = adjacency_dict(n, edges)
    return {v: bfs_dict(adj, v) for v in range(n)}


def true_diameter(n, edges, within=None):
    """Exact diameter over ``within`` (default: all nodes), assuming those
    nodes are mutually reachable."""
    adj = adjacency_dict(n, edges)
    nodes = list(within) if within is not None else list(range(n))
    best = 0
    for v in nodes:
        dist = bfs_dict(adj, v)
        best = max(best, max(dist[u] for u in nodes))
    return best


def exact_mean_distance(n, edges, within):
    """Average distance over ordered pairs of ``within``, self-pairs at 0."""
    adj = adjacency_dict(n, edges)
    nodes = list(within)
    total = 0
    for v in nodes:
        dist = bfs_dict(adj, v)
        total += sum(dist[u] for u in nodes)
    return total / (len(nodes) * len(nodes))


class UnionFindOracle:
    """Textbook union-find for partition ground truth."""

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def groups(self):
        out = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return sorted(out.values())


def random_edges(rng, n, p):
    """G(n, p) edge list, every unordered pair tossed independently."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j))
    return edges


def is_connected(n, edges):
    if n == 0:
        return False
    adj = adjacency_dict(n, edges)
    return len(bfs_dict(adj, 0)) == n


def connected_random_graph(seed, n, p):
    """Seeded G(n, p) resampled until connected."""
    rng = np.random.default_rng(seed)
    while True:
        edges = random_edges(rng, n, p)
        if is_connected(n, edges):
            return edges
