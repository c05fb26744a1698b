"""Distance statistics: BFS, average-distance estimation, diameter bounds.

Exhaustive distance computation is off the table at measurement scale, so
everything here leans on a small number of full BFS runs. The average
distance is estimated by sampling sources uniformly from the giant component
until the running mean settles. The diameter is bracketed from below by
double-sweep eccentricities and from above by the diameter of a BFS tree,
which contains all of the graph's nodes but only a subset of its links, so
its diameter (computable exactly by two tree sweeps) can only overestimate.
Repeating both with fresh starting points tightens the bracket.

Distances are restricted to the giant component throughout; a node's mean
distance includes the zero distance to itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from netreplay.graph import Snapshot, frontier_neighbors


@dataclass(frozen=True)
class EstimatorConfig:
    """Stopping rule: after ``i_min`` samples, stop as soon as the last
    ``i_min`` successive running means each moved less than ``epsilon``."""

    i_min: int = 10
    epsilon: float = 0.1
    rng_seed: object = 0

    def __post_init__(self):
        if self.i_min < 1:
            raise ValueError("i_min must be at least 1")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class BoundConfig:
    """Iterate at least ``min_iterations`` times, stop once the bracket is
    narrower than ``gap_target``, give up at ``iteration_cap``."""

    min_iterations: int = 10
    gap_target: int = 5
    iteration_cap: int = 100
    rng_seed: object = 0

    def __post_init__(self):
        if self.min_iterations < 1:
            raise ValueError("min_iterations must be at least 1")
        if self.gap_target < 1:
            raise ValueError("gap_target must be at least 1")
        if self.iteration_cap < self.min_iterations:
            raise ValueError("iteration_cap must be at least min_iterations")


class BfsResult(NamedTuple):
    dist: np.ndarray  # int32 hops from source, -1 where unreached
    farthest: int  # smallest-index node at maximum distance
    farthest_dist: int


class BoundsOutcome(NamedTuple):
    lower: int
    upper: int
    iterations: int
    converged: bool
    lower_history: tuple[int, ...]
    upper_history: tuple[int, ...]


@dataclass(frozen=True)
class DistanceReport:
    """Distance group of one checkpoint's statistics."""

    average_distance: float
    samples_used: int
    diameter_lower: int
    diameter_upper: int
    bound_iterations: int
    converged: bool


def _bfs_levels(
    offsets: np.ndarray,
    neighbors: np.ndarray,
    source: int,
    want_parent: bool = False,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Level-synchronous BFS equivalent to a FIFO queue with neighbors
    visited in ascending order; parents, when requested, match that order."""
    n = offsets.size - 1
    dist = np.full(n, -1, dtype=np.int32)
    parent = np.full(n, -1, dtype=np.int32) if want_parent else None
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        nbrs, origin = frontier_neighbors(offsets, neighbors, frontier)
        if nbrs.size == 0:
            break
        unseen = dist[nbrs] < 0
        cand = nbrs[unseen]
        if cand.size == 0:
            break
        level += 1
        uniq, first = np.unique(cand, return_index=True)
        discovery_order = np.argsort(first, kind="stable")
        frontier = uniq[discovery_order].astype(np.int64)
        dist[frontier] = level
        if want_parent:
            parent[frontier] = origin[unseen][first[discovery_order]]
    return dist, parent


def bfs(snapshot: Snapshot, source: int) -> BfsResult:
    """Hop distances from ``source``; unreached nodes get -1."""
    if not 0 <= source < snapshot.n:
        raise IndexError(f"source {source} out of range [0, {snapshot.n})")
    dist, _ = _bfs_levels(snapshot.offsets, snapshot.neighbors, source)
    far = int(np.argmax(dist))
    return BfsResult(dist=dist, farthest=far, farthest_dist=int(dist[far]))


def mean_distance_from(snapshot: Snapshot, giant_mask: np.ndarray, source: int) -> float:
    """Mean distance from ``source`` to every giant-component node,
    the source's own zero included."""
    if not giant_mask[source]:
        raise ValueError(f"source {source} is outside the giant component")
    dist, _ = _bfs_levels(snapshot.offsets, snapshot.neighbors, source)
    inside = dist[giant_mask]
    if np.any(inside < 0):
        raise ValueError("giant mask contains nodes unreachable from source")
    return int(inside.sum(dtype=np.int64)) / int(inside.size)


def estimate_average_distance(
    snapshot: Snapshot, giant_mask: np.ndarray, config: EstimatorConfig = EstimatorConfig()
) -> tuple[float, int]:
    """Sampled average distance over the giant component.

    Draws sources uniformly at random with replacement, maintains the running
    mean of their mean distances, and stops once ``config.i_min`` successive
    estimates in a row each changed by less than ``config.epsilon``. Returns
    (estimate, number of sources sampled); the sample count is always at
    least i_min + 1.
    """
    nodes = np.nonzero(giant_mask)[0]
    if nodes.size < 2:
        raise ValueError("giant component must have at least 2 nodes")
    rng = np.random.default_rng(config.rng_seed)
    samples: list[float] = []
    means: list[float] = []
    while True:
        v = int(nodes[rng.integers(nodes.size)])
        samples.append(mean_distance_from(snapshot, giant_mask, v))
        means.append(math.fsum(samples) / len(samples))
        i = len(means)
        if i > config.i_min:
            window = means[i - config.i_min - 1 :]
            if all(
                abs(window[j + 1] - window[j]) < config.epsilon
                for j in range(len(window) - 1)
            ):
                return means[-1], i


def average_distance_exact(snapshot: Snapshot, giant_mask: np.ndarray) -> float:
    """All-sources average distance over the giant component; the saturated
    version of the estimator (every node sampled exactly once)."""
    nodes = np.nonzero(giant_mask)[0]
    if nodes.size < 2:
        raise ValueError("giant component must have at least 2 nodes")
    samples = [mean_distance_from(snapshot, giant_mask, int(v)) for v in nodes]
    return math.fsum(samples) / len(samples)


def diameter_lower_bound(
    snapshot: Snapshot, giant_mask: np.ndarray, start: int
) -> tuple[int, int]:
    """Double sweep: BFS from ``start``, then the eccentricity of the node
    found farthest. Returns (bound, that node). Never exceeds the diameter."""
    if not giant_mask[start]:
        raise ValueError(f"start {start} is outside the giant component")
    first = bfs(snapshot, start)
    second = bfs(snapshot, first.farthest)
    return second.farthest_dist, first.farthest


def diameter_upper_bound(snapshot: Snapshot, giant_mask: np.ndarray, root: int) -> int:
    """Exact diameter of the BFS tree rooted at ``root``.

    The tree spans the giant component with a subset of its links, so every
    graph distance is at most the tree distance and the tree diameter bounds
    the graph diameter from above. On a tree, two sweeps give the exact
    diameter.
    """
    if not giant_mask[root]:
        raise ValueError(f"root {root} is outside the giant component")
    n = snapshot.n
    dist, parent = _bfs_levels(snapshot.offsets, snapshot.neighbors, root, want_parent=True)
    reached = np.nonzero(dist >= 0)[0]
    children = reached[reached != root]
    if children.size == 0:
        return 0
    parents = parent[children].astype(np.int64)
    src = np.concatenate((children, parents))
    dst = np.concatenate((parents, children))
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    tree_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=tree_offsets[1:])
    tree_neighbors = dst.astype(np.int32)
    sweep1, _ = _bfs_levels(tree_offsets, tree_neighbors, root)
    far = int(np.argmax(sweep1))
    sweep2, _ = _bfs_levels(tree_offsets, tree_neighbors, far)
    return int(sweep2.max())


def diameter_bounds(
    snapshot: Snapshot, giant_mask: np.ndarray, config: BoundConfig = BoundConfig()
) -> BoundsOutcome:
    """Iterated sandwich of the giant component's diameter.

    Each round runs one double sweep from a random giant node (raising the
    lower bound) and one BFS-tree bound from the next root in degree-descending
    order (lowering the upper bound), so the bracket can only tighten. Stops
    after at least ``min_iterations`` rounds once upper - lower < gap_target,
    or unconditionally at ``iteration_cap``.
    """
    nodes = np.nonzero(giant_mask)[0]
    if nodes.size < 2:
        raise ValueError("giant component must have at least 2 nodes")
    deg = snapshot.degrees
    root_order = nodes[np.lexsort((nodes, -deg[nodes]))]
    rng = np.random.default_rng(config.rng_seed)
    lower = 0
    upper: Optional[int] = None
    lowers: list[int] = []
    uppers: list[int] = []
    t = 0
    while True:
        t += 1
        start = int(nodes[rng.integers(nodes.size)])
        candidate, _ = diameter_lower_bound(snapshot, giant_mask, start)
        if candidate > lower:
            lower = candidate
        root = int(root_order[(t - 1) % root_order.size])
        tree_bound = diameter_upper_bound(snapshot, giant_mask, root)
        upper = tree_bound if upper is None else min(upper, tree_bound)
        lowers.append(lower)
        uppers.append(upper)
        if t >= config.iteration_cap:
            break
        if t >= config.min_iterations and upper - lower < config.gap_target:
            break
    return BoundsOutcome(
        lower=lower,
        upper=upper,
        iterations=t,
        converged=upper - lower < config.gap_target,
        lower_history=tuple(lowers),
        upper_history=tuple(uppers),
    )
