"""BFS correctness, the sampled mean-distance estimator, diameter bracketing."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netreplay.connectivity import components
from netreplay.distances import (
    BoundConfig,
    EstimatorConfig,
    average_distance_exact,
    bfs,
    diameter_bounds,
    diameter_lower_bound,
    diameter_upper_bound,
    estimate_average_distance,
    mean_distance_from,
)
from netreplay.graph import snapshot_from_edges

from conftest import (
    adjacency_dict,
    bfs_dict,
    connected_random_graph,
    exact_mean_distance,
    random_edges,
    true_diameter,
)


def cycle_edges(n):
    return [(i, (i + 1) % n) for i in range(n)]


def path_edges(n):
    return [(i, i + 1) for i in range(n - 1)]


def complete_edges(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def full_mask(n):
    return np.ones(n, dtype=bool)


class TestBfs:
    def test_path(self):
        r = bfs(snapshot_from_edges(path_edges(5)), 0)
        assert r.dist.tolist() == [0, 1, 2, 3, 4]
        assert r.farthest == 4
        assert r.farthest_dist == 4

    def test_unreached_marked(self):
        r = bfs(snapshot_from_edges([(0, 1), (2, 3)]), 0)
        assert r.dist.tolist() == [0, 1, -1, -1]

    def test_farthest_tie_takes_smallest_index(self):
        # from the cycle's node 0, nodes 2 and 4 are both at distance 2
        r = bfs(snapshot_from_edges(cycle_edges(6)), 0)
        assert r.farthest_dist == 3
        assert r.farthest == 3
        r2 = bfs(snapshot_from_edges(cycle_edges(5)), 0)
        assert r2.farthest_dist == 2
        assert r2.farthest == 2  # ties with 3, smaller index wins

    def test_source_out_of_range(self):
        with pytest.raises(IndexError):
            bfs(snapshot_from_edges([(0, 1)]), 2)

    def test_matches_queue_bfs_on_random_graphs(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            n = int(rng.integers(2, 40))
            edges = random_edges(rng, n, 0.15)
            snap = snapshot_from_edges(edges, n=n)
            src = int(rng.integers(n))
            got = bfs(snap, src).dist
            want = bfs_dict(adjacency_dict(n, edges), src)
            for v in range(n):
                assert got[v] == want.get(v, -1)


class TestMeanDistance:
    def test_path_center(self):
        snap = snapshot_from_edges(path_edges(3))
        assert mean_distance_from(snap, full_mask(3), 1) == pytest.approx(2 / 3)

    def test_includes_self_at_zero(self):
        snap = snapshot_from_edges([(0, 1)])
        assert mean_distance_from(snap, full_mask(2), 0) == 0.5

    def test_restricted_to_giant(self):
        snap = snapshot_from_edges([(0, 1), (1, 2), (3, 4)])
        mask = components(snap).giant_mask()
        assert mask.tolist() == [True, True, True, False, False]
        assert mean_distance_from(snap, mask, 0) == pytest.approx(1.0)

    def test_source_outside_giant_rejected(self):
        snap = snapshot_from_edges([(0, 1), (1, 2), (3, 4)])
        mask = components(snap).giant_mask()
        with pytest.raises(ValueError):
            mean_distance_from(snap, mask, 3)

    def test_unreachable_mask_member_rejected(self):
        snap = snapshot_from_edges([(0, 1), (2, 3)])
        with pytest.raises(ValueError):
            mean_distance_from(snap, full_mask(4), 0)

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(15):
            n = int(rng.integers(3, 30))
            edges = connected_random_graph(int(rng.integers(10**6)), n, 0.25)
            snap = snapshot_from_edges(edges, n=n)
            src = int(rng.integers(n))
            got = mean_distance_from(snap, full_mask(n), src)
            adj = adjacency_dict(n, edges)
            want = sum(bfs_dict(adj, src).values()) / n
            assert got == pytest.approx(want, rel=1e-12)


class TestEstimator:
    def test_saturated_matches_exact_to_one_ulp(self):
        # on a complete graph every source yields the same mean, so the
        # estimator settles immediately and must equal the exact average
        snap = snapshot_from_edges(complete_edges(10))
        mask = full_mask(10)
        exact = average_distance_exact(snap, mask)
        est, used = estimate_average_distance(
            snap, mask, EstimatorConfig(i_min=10, epsilon=0.1, rng_seed=1)
        )
        assert abs(est - exact) <= math.ulp(exact)
        assert used == 11
        assert exact == 0.9  # 9 neighbors at 1, self at 0

    def test_sample_count_is_at_least_i_min_plus_one(self):
        snap = snapshot_from_edges(cycle_edges(8))
        _, used = estimate_average_distance(
            snap, full_mask(8), EstimatorConfig(i_min=4, epsilon=10.0, rng_seed=0)
        )
        assert used == 5

    def test_estimate_close_on_vertex_transitive_graph(self):
        # every source of a cycle has the same mean distance; estimate exact
        snap = snapshot_from_edges(cycle_edges(9))
        mask = full_mask(9)
        est, _ = estimate_average_distance(
            snap, mask, EstimatorConfig(i_min=3, epsilon=0.5, rng_seed=7)
        )
        assert est == pytest.approx(average_distance_exact(snap, mask), abs=1e-12)

    def test_deterministic_for_fixed_seed(self):
        edges = connected_random_graph(99, 40, 0.1)
        snap = snapshot_from_edges(edges, n=40)
        cfg = EstimatorConfig(i_min=5, epsilon=0.05, rng_seed=42)
        a = estimate_average_distance(snap, full_mask(40), cfg)
        b = estimate_average_distance(snap, full_mask(40), cfg)
        assert a == b

    def test_reasonable_accuracy_on_random_graph(self):
        edges = connected_random_graph(5, 60, 0.12)
        snap = snapshot_from_edges(edges, n=60)
        est, _ = estimate_average_distance(
            snap, full_mask(60), EstimatorConfig(i_min=15, epsilon=0.05, rng_seed=3)
        )
        exact = exact_mean_distance(60, edges, range(60))
        assert abs(est - exact) < 0.35

    def test_exact_matches_oracle(self):
        edges = connected_random_graph(31, 25, 0.2)
        snap = snapshot_from_edges(edges, n=25)
        got = average_distance_exact(snap, full_mask(25))
        assert got == pytest.approx(exact_mean_distance(25, edges, range(25)), rel=1e-12)

    def test_tiny_giant_rejected(self):
        snap = snapshot_from_edges([(0, 1)], n=3)
        lonely = np.array([True, False, False])
        with pytest.raises(ValueError):
            estimate_average_distance(snap, lonely)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            EstimatorConfig(i_min=0)
        with pytest.raises(ValueError):
            EstimatorConfig(epsilon=0.0)


class TestLowerBound:
    def test_path_from_middle_finds_full_length(self):
        snap = snapshot_from_edges(path_edges(5))
        bound, witness = diameter_lower_bound(snap, full_mask(5), 2)
        assert bound == 4
        assert witness in (0, 4)

    def test_start_outside_giant_rejected(self):
        snap = snapshot_from_edges([(0, 1), (1, 2), (3, 4)])
        mask = components(snap).giant_mask()
        with pytest.raises(ValueError):
            diameter_lower_bound(snap, mask, 4)

    def test_never_exceeds_true_diameter_exhaustive(self):
        # every connected graph on 5 nodes, every start
        nodes = range(5)
        pool = list(itertools.combinations(nodes, 2))
        count = 0
        for bits in range(1 << len(pool)):
            edges = [pool[i] for i in range(len(pool)) if bits >> i & 1]
            if len(edges) < 4:
                continue
            adj = adjacency_dict(5, edges)
            if len(bfs_dict(adj, 0)) != 5:
                continue
            count += 1
            snap = snapshot_from_edges(edges, n=5)
            diam = true_diameter(5, edges)
            for start in nodes:
                bound, _ = diameter_lower_bound(snap, full_mask(5), start)
                assert bound <= diam
        assert count > 100

    def test_exact_on_trees(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            n = int(rng.integers(2, 60))
            edges = [(int(rng.integers(v)), v) for v in range(1, n)]
            snap = snapshot_from_edges(edges, n=n)
            start = int(rng.integers(n))
            bound, _ = diameter_lower_bound(snap, full_mask(n), start)
            assert bound == true_diameter(n, edges)


class TestUpperBound:
    def test_cycle_of_six_tree_bound(self):
        # BFS tree from node 0 leaves out one cycle link; its diameter is 5
        snap = snapshot_from_edges(cycle_edges(6))
        assert diameter_upper_bound(snap, full_mask(6), 0) == 5

    def test_exact_on_trees(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            n = int(rng.integers(2, 60))
            edges = [(int(rng.integers(v)), v) for v in range(1, n)]
            snap = snapshot_from_edges(edges, n=n)
            root = int(rng.integers(n))
            assert diameter_upper_bound(snap, full_mask(n), root) == true_diameter(
                n, edges
            )

    def test_complete_graph(self):
        snap = snapshot_from_edges(complete_edges(5))
        # BFS tree is a star around the root; its diameter is 2
        assert diameter_upper_bound(snap, full_mask(5), 0) == 2

    def test_single_link(self):
        snap = snapshot_from_edges([(0, 1)])
        assert diameter_upper_bound(snap, full_mask(2), 0) == 1

    def test_never_below_true_diameter_exhaustive(self):
        nodes = range(5)
        pool = list(itertools.combinations(nodes, 2))
        for bits in range(1 << len(pool)):
            edges = [pool[i] for i in range(len(pool)) if bits >> i & 1]
            if len(edges) < 4:
                continue
            adj = adjacency_dict(5, edges)
            if len(bfs_dict(adj, 0)) != 5:
                continue
            snap = snapshot_from_edges(edges, n=5)
            diam = true_diameter(5, edges)
            for root in nodes:
                assert diameter_upper_bound(snap, full_mask(5), root) >= diam

    def test_root_outside_giant_rejected(self):
        snap = snapshot_from_edges([(0, 1), (1, 2), (3, 4)])
        mask = components(snap).giant_mask()
        with pytest.raises(ValueError):
            diameter_upper_bound(snap, mask, 3)


class TestDiameterBounds:
    def test_sandwich_on_random_graphs(self):
        for seed in range(8):
            edges = connected_random_graph(seed, 45, 0.1)
            snap = snapshot_from_edges(edges, n=45)
            out = diameter_bounds(
                snap, full_mask(45), BoundConfig(min_iterations=4, gap_target=1, iteration_cap=30)
            )
            diam = true_diameter(45, edges)
            assert out.lower <= diam <= out.upper

    def test_trees_converge_in_one_iteration(self):
        rng = np.random.default_rng(37)
        for _ in range(10):
            n = int(rng.integers(3, 50))
            edges = [(int(rng.integers(v)), v) for v in range(1, n)]
            snap = snapshot_from_edges(edges, n=n)
            out = diameter_bounds(
                snap,
                full_mask(n),
                BoundConfig(min_iterations=1, gap_target=1, iteration_cap=50, rng_seed=4),
            )
            assert out.iterations == 1
            assert out.converged
            assert out.lower == out.upper == true_diameter(n, edges)

    def test_histories_monotone_and_final(self):
        edges = connected_random_graph(77, 60, 0.07)
        snap = snapshot_from_edges(edges, n=60)
        out = diameter_bounds(
            snap, full_mask(60), BoundConfig(min_iterations=6, gap_target=1, iteration_cap=25)
        )
        lows = np.array(out.lower_history)
        ups = np.array(out.upper_history)
        assert np.all(np.diff(lows) >= 0)
        assert np.all(np.diff(ups) <= 0)
        assert out.lower == lows[-1] and out.upper == ups[-1]
        assert len(out.lower_history) == out.iterations

    def test_cap_stops_iteration(self):
        # a long cycle keeps the bracket open: lower settles at the true
        # diameter, tree upper bounds stay higher, so the cap must fire
        snap = snapshot_from_edges(cycle_edges(30))
        out = diameter_bounds(
            snap,
            full_mask(30),
            BoundConfig(min_iterations=1, gap_target=1, iteration_cap=7),
        )
        assert out.iterations == 7
        assert not out.converged
        assert out.lower == 15
        assert out.upper >= 16

    def test_min_iterations_enforced(self):
        snap = snapshot_from_edges(complete_edges(6))
        out = diameter_bounds(
            snap, full_mask(6), BoundConfig(min_iterations=5, gap_target=10, iteration_cap=20)
        )
        assert out.iterations == 5

    def test_deterministic_for_fixed_seed(self):
        edges = connected_random_graph(3, 40, 0.12)
        snap = snapshot_from_edges(edges, n=40)
        cfg = BoundConfig(min_iterations=3, gap_target=2, iteration_cap=15, rng_seed=11)
        assert diameter_bounds(snap, full_mask(40), cfg) == diameter_bounds(
            snap, full_mask(40), cfg
        )

    def test_respects_giant_restriction(self):
        edges = path_edges(6) + [(7, 8)]
        snap = snapshot_from_edges(edges, n=9)
        mask = components(snap).giant_mask()
        out = diameter_bounds(
            snap, mask, BoundConfig(min_iterations=2, gap_target=1, iteration_cap=10)
        )
        assert out.lower == out.upper == 5

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BoundConfig(min_iterations=0)
        with pytest.raises(ValueError):
            BoundConfig(gap_target=0)
        with pytest.raises(ValueError):
            BoundConfig(min_iterations=10, iteration_cap=5)


@st.composite
def connected_graphs(draw):
    n = draw(st.integers(min_value=2, max_value=16))
    # spanning tree guarantees connectivity, extras drawn on top
    tree = [(draw(st.integers(min_value=0, max_value=v - 1)), v) for v in range(1, n)]
    pool = [(i, j) for i in range(n) for j in range(i + 1, n)]
    extra = draw(st.lists(st.sampled_from(pool), unique=True, max_size=20))
    edges = sorted(set(tree) | {(min(a, b), max(a, b)) for a, b in extra})
    return n, edges


class TestBracketProperty:
    @given(connected_graphs(), st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=60, deadline=None)
    def test_bounds_always_bracket_truth(self, case, seed):
        n, edges = case
        snap = snapshot_from_edges(edges, n=n)
        out = diameter_bounds(
            snap,
            np.ones(n, dtype=bool),
            BoundConfig(min_iterations=2, gap_target=1, iteration_cap=6, rng_seed=seed),
        )
        diam = true_diameter(n, edges)
        assert out.lower <= diam <= out.upper
