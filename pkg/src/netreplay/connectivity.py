"""Connected components and giant-component tracking.

Two routes to the same answer. ``components`` labels a finished snapshot by
breadth-first search, the reference method. ``IncrementalComponents`` is a
union-find fed link by link during replay; since links are only ever added,
merges are the only structural change and every checkpoint gets its component
count in effectively constant time instead of a fresh traversal. The giant
component is the largest one; ties go to the component containing the
smallest node index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from netreplay.graph import Snapshot, frontier_neighbors


@dataclass(frozen=True)
class ComponentSummary:
    """Per-snapshot component structure."""

    component_count: int
    giant_size: int
    giant_fraction: float
    component_id: np.ndarray  # int32 label per node, in order of first node index
    giant_id: int

    def __post_init__(self):
        self.component_id.setflags(write=False)

    def giant_mask(self) -> np.ndarray:
        return self.component_id == self.giant_id


def components(snapshot: Snapshot) -> ComponentSummary:
    """Label components by BFS from each unvisited node in index order."""
    n = snapshot.n
    if n == 0:
        raise ValueError("empty snapshot has no components")
    labels = np.full(n, -1, dtype=np.int32)
    next_label = 0
    scan = 0
    while scan < n:
        if labels[scan] >= 0:
            scan += 1
            continue
        labels[scan] = next_label
        frontier = np.array([scan], dtype=np.int64)
        while frontier.size:
            nbrs, _ = frontier_neighbors(snapshot.offsets, snapshot.neighbors, frontier)
            if nbrs.size == 0:
                break
            fresh = nbrs[labels[nbrs] < 0]
            if fresh.size == 0:
                break
            frontier = np.unique(fresh).astype(np.int64)
            labels[frontier] = next_label
        next_label += 1
        scan += 1
    sizes = np.bincount(labels, minlength=next_label)
    giant_id = int(np.argmax(sizes))  # first max = smallest min-index component
    giant_size = int(sizes[giant_id])
    return ComponentSummary(
        component_count=next_label,
        giant_size=giant_size,
        giant_fraction=giant_size / n,
        component_id=labels,
        giant_id=giant_id,
    )


class IncrementalComponents:
    """Union-find over a growing node range, merged as links arrive.

    Tracks, per root: component size and smallest member index. A running
    best (size, then smallest index) makes giant lookups O(1). Nodes join as
    singletons via ``ensure``; ``add_link`` extends the range as needed.
    """

    def __init__(self):
        self._parent: list[int] = []
        self._size: list[int] = []
        self._min_idx: list[int] = []
        self._count = 0
        self._best_root = -1  # giant candidate, kept current across merges

    @property
    def n(self) -> int:
        return len(self._parent)

    @property
    def component_count(self) -> int:
        return self._count

    def ensure(self, n: int) -> None:
        """Grow the node range to n, adding singleton components."""
        i = len(self._parent)
        while i < n:
            self._parent.append(i)
            self._size.append(1)
            self._min_idx.append(i)
            self._count += 1
            if self._best_root < 0:
                self._best_root = i
            i += 1

    def find(self, x: int) -> int:
        parent = self._parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    def add_link(self, u: int, v: int) -> None:
        hi = u if u > v else v
        if hi >= len(self._parent):
            self.ensure(hi + 1)
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return
        if self._size[ru] < self._size[rv]:
            ru, rv = rv, ru
        self._parent[rv] = ru
        self._size[ru] += self._size[rv]
        if self._min_idx[rv] < self._min_idx[ru]:
            self._min_idx[ru] = self._min_idx[rv]
        self._count -= 1
        best = self._best_root
        if ru != best:
            merged = (-self._size[ru], self._min_idx[ru])
            if best < 0 or merged < (-self._size[best], self._min_idx[best]):
                self._best_root = ru
        # if ru is already best it only grew

    def roots(self) -> np.ndarray:
        """Resolved root per node, vectorized by repeated pointer jumping."""
        arr = np.asarray(self._parent, dtype=np.int64)
        while True:
            nxt = arr[arr]
            if np.array_equal(nxt, arr):
                return arr
            arr = nxt

    def summary(self) -> ComponentSummary:
        n = len(self._parent)
        if n == 0:
            raise ValueError("no nodes added")
        roots = self.roots()
        giant_root = self._best_root
        # renumber roots to labels ordered by smallest member = first occurrence
        _, first_pos, labels = np.unique(roots, return_index=True, return_inverse=True)
        order = np.argsort(first_pos, kind="stable")
        relabel = np.empty(order.size, dtype=np.int32)
        relabel[order] = np.arange(order.size, dtype=np.int32)
        component_id = relabel[labels]
        giant_id = int(component_id[self._min_idx[giant_root]])
        giant_size = self._size[giant_root]
        return ComponentSummary(
            component_count=self._count,
            giant_size=giant_size,
            giant_fraction=giant_size / n,
            component_id=component_id,
            giant_id=giant_id,
        )

    def giant(self) -> tuple[int, int, float]:
        """(size, root, fraction) of the current giant component."""
        n = len(self._parent)
        if n == 0:
            raise ValueError("no nodes added")
        root = self._best_root
        size = self._size[root]
        return size, root, size / n
