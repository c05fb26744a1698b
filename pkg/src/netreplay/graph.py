"""Append-only graph storage and immutable sorted-adjacency snapshots.

The replay loop feeds links into a :class:`GrowingGraph` one at a time;
statistics never run on the mutable structure. Instead, ``finalize_snapshot``
freezes the current state into a :class:`Snapshot`: a compact CSR layout
(offsets plus one concatenated neighbor array) whose per-node segments are
sorted, so membership tests are binary searches and traversals are cheap
vectorized gathers. Snapshots cost Theta(m) memory; finalizing after a batch
of insertions only re-sorts the segments the batch touched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Snapshot:
    """Frozen undirected graph in CSR form; node i's neighbors are
    ``neighbors[offsets[i]:offsets[i+1]]``, sorted ascending."""

    offsets: np.ndarray  # int64, length n + 1
    neighbors: np.ndarray  # int32, length 2m
    n: int
    m: int
    checkpoint_time: int = 0

    def __post_init__(self):
        self.offsets.setflags(write=False)
        self.neighbors.setflags(write=False)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} out of range [0, {self.n})")
        return int(self.offsets[v + 1] - self.offsets[v])

    def neighbors_of(self, v: int) -> np.ndarray:
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} out of range [0, {self.n})")
        return self.neighbors[self.offsets[v] : self.offsets[v + 1]]


def has_link(snapshot: Snapshot, u: int, v: int) -> bool:
    """Binary-search membership test on the sorted neighbor segment."""
    seg = snapshot.neighbors_of(u)
    if not 0 <= v < snapshot.n:
        raise IndexError(f"node {v} out of range [0, {snapshot.n})")
    i = int(np.searchsorted(seg, v))
    return i < seg.size and int(seg[i]) == v


class GrowingGraph:
    """Mutable adjacency built by appending first-discovery links.

    Per-node neighbor storage doubles in place, so a replay of m links costs
    amortized Theta(1) per insertion. Callers guarantee links are not loops
    and not repeats; node indices are dense but may arrive in any order, and
    the node range silently extends to cover the largest endpoint seen.
    """

    def __init__(self, expected_nodes: int = 0):
        self._nbr: list[np.ndarray] = []
        self._deg: list[int] = []
        self._dirty: set[int] = set()
        self._m = 0
        if expected_nodes:
            self._extend(expected_nodes)

    @property
    def n(self) -> int:
        return len(self._nbr)

    @property
    def m(self) -> int:
        return self._m

    def _extend(self, n: int) -> None:
        while len(self._nbr) < n:
            self._nbr.append(np.empty(4, dtype=np.int32))
            self._deg.append(0)

    def _append(self, x: int, y: int) -> None:
        arr = self._nbr[x]
        d = self._deg[x]
        if d == arr.size:
            grown = np.empty(2 * arr.size, dtype=np.int32)
            grown[:d] = arr
            self._nbr[x] = grown
            arr = grown
        arr[d] = y
        self._deg[x] = d + 1
        self._dirty.add(x)

    def add_link(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"loop ({u}, {u}) is not a link")
        if u < 0 or v < 0:
            raise ValueError(f"negative node index in link ({u}, {v})")
        hi = u if u > v else v
        if hi >= len(self._nbr):
            self._extend(hi + 1)
        self._append(u, v)
        self._append(v, u)
        self._m += 1

    def degree(self, v: int) -> int:
        return self._deg[v]


def finalize_snapshot(graph: GrowingGraph, n: int | None = None, checkpoint_time: int = 0) -> Snapshot:
    """Freeze the graph into a Snapshot without disturbing future growth.

    Only segments touched since the previous snapshot are re-sorted. ``n``
    may exceed the largest linked node to account for nodes discovered
    without links; the extra indices get empty segments.
    """
    if n is None:
        n = graph.n
    elif n < graph.n:
        raise ValueError(f"snapshot n={n} smaller than linked range {graph.n}")
    for x in graph._dirty:
        graph._nbr[x][: graph._deg[x]].sort()
    graph._dirty.clear()

    offsets = np.zeros(n + 1, dtype=np.int64)
    if graph.n:
        np.cumsum(graph._deg, out=offsets[1 : graph.n + 1])
    offsets[graph.n + 1 :] = offsets[graph.n]
    if graph._m:
        neighbors = np.concatenate(
            [graph._nbr[x][: graph._deg[x]] for x in range(graph.n)]
        )
    else:
        neighbors = np.empty(0, dtype=np.int32)
    return Snapshot(
        offsets=offsets, neighbors=neighbors, n=n, m=graph.m, checkpoint_time=checkpoint_time
    )


def snapshot_from_edges(
    edges, n: int | None = None, checkpoint_time: int = 0
) -> Snapshot:
    """Build a snapshot directly from an iterable of distinct (u, v) pairs."""
    g = GrowingGraph()
    for u, v in edges:
        g.add_link(int(u), int(v))
    if n is not None and n < g.n:
        raise ValueError(f"n={n} smaller than largest endpoint range {g.n}")
    return finalize_snapshot(g, n=n, checkpoint_time=checkpoint_time)


def frontier_neighbors(
    offsets: np.ndarray, neighbors: np.ndarray, frontier: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gather the concatenated neighbor lists of ``frontier`` in order.

    Returns (gathered neighbors, matching source per entry). Entry order is
    frontier order, ascending within each node's segment; BFS layers built
    from this reproduce a FIFO traversal with ascending tie-breaks.
    """
    starts = offsets[frontier]
    counts = offsets[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        e = np.empty(0, dtype=neighbors.dtype)
        return e, np.empty(0, dtype=frontier.dtype)
    ends = np.cumsum(counts)
    idx = np.arange(total, dtype=np.int64) - np.repeat(ends - counts, counts) + np.repeat(
        starts, counts
    )
    return neighbors[idx], np.repeat(frontier, counts)
