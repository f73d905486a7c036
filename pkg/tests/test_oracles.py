import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctsbandit.core import CapabilityError, CapacityError, linear_reward
from ctsbandit.oracles import (
    Enumerated,
    InfeasibleError,
    Matching,
    MSets,
    Partition,
    Path,
    enumerate_actions,
    initial_cover,
    load_edge_list,
    oracle,
    road_graph,
)

A, B, C = 0, 1, 2
TRIANGLE = [(0, 1), (1, 2), (0, 2)]  # a: s->v, b: v->t, c: s->t


def brute_best(space, w):
    values = [linear_reward(a, w) for a in space.enumerate()]
    return max(values)


def random_graph(rng, nodes):
    arcs = [(u, v) for u in range(nodes) for v in range(nodes) if u != v and rng.random() < 0.35]
    if (0, nodes - 1) not in arcs:
        arcs.append((0, nodes - 1))
    return arcs


class TestOracleExamples:
    def test_msets_top_two(self):
        assert oracle(MSets(4, 2), [0.1, 0.9, 0.5, 0.2]) == (1, 2)

    def test_matching_diagonal(self):
        assert oracle(Matching(2), [3, 1, 2, 4]) == (0, 3)

    def test_path_two_hops_beat_direct(self):
        space = Path(TRIANGLE, 0, 2)
        assert oracle(space, [-0.1, -0.1, -0.3]) == (A, B)

    def test_partition_best_block(self):
        assert oracle(Partition(6, 3), [0, 0, 0, 1, 1, 1]) == (3, 4, 5)

    def test_weight_shape_checked(self):
        with pytest.raises(ValueError):
            MSets(4, 2).oracle([1.0, 2.0])

    def test_path_rejects_positive_weights(self):
        with pytest.raises(ValueError):
            Path(TRIANGLE, 0, 2).oracle([0.1, -0.1, -0.3])

    def test_path_unreachable(self):
        with pytest.raises(InfeasibleError):
            Path([(0, 1), (2, 1)], 0, 2)


class TestTies:
    def test_msets_lexicographic(self):
        # all equal: smallest incidence vector keeps the last arms
        assert MSets(4, 2).oracle(np.zeros(4)) == (2, 3)

    def test_partition_lexicographic(self):
        assert Partition(6, 3).oracle(np.zeros(6)) == (3, 4, 5)

    def test_enumerated_lexicographic(self):
        space = Enumerated([[0, 1], [1, 2], [2, 3]])
        assert space.oracle(np.zeros(4)) == (2, 3)

    @pytest.mark.parametrize("space", [Matching(3), Path(road_graph(8, 20, 1), 0, 7)])
    def test_deterministic(self, space):
        w = -np.round(np.random.default_rng(0).random(space.n), 1)
        assert space.oracle(w) == space.oracle(w.copy())


class TestEnumeration:
    def test_msets(self):
        assert enumerate_actions(MSets(3, 2)) == [(0, 1), (0, 2), (1, 2)]

    def test_matching_count(self):
        acts = enumerate_actions(Matching(3))
        assert len(acts) == 6 and len(set(acts)) == 6

    def test_partition(self):
        assert enumerate_actions(Partition(6, 3)) == [(0, 1, 2), (3, 4, 5)]

    def test_path_triangle(self):
        assert enumerate_actions(Path(TRIANGLE, 0, 2)) == [(A, B), (C,)]

    def test_caps(self):
        with pytest.raises(CapacityError):
            MSets(30, 15).enumerate()
        with pytest.raises(CapacityError):
            Matching(9).enumerate()
        with pytest.raises(CapacityError):
            Path(road_graph(), 0, 38).enumerate(cap=1000)


class TestInitialCover:
    def test_matching_cyclic_shifts(self):
        assert initial_cover(Matching(2)) == [(0, 3), (1, 2)]

    def test_partition_blocks(self):
        assert initial_cover(Partition(6, 3)) == [(0, 1, 2), (3, 4, 5)]

    @pytest.mark.parametrize("n,m", [(5, 2), (6, 2), (7, 3), (4, 4)])
    def test_msets_covers(self, n, m):
        cover = initial_cover(MSets(n, m))
        assert set().union(*cover) == set(range(n))
        assert all(len(a) == m for a in cover)

    def test_enumerated_greedy(self):
        space = Enumerated([[0, 1], [1, 2], [2, 3], [0, 3]])
        assert initial_cover(space) == [(0, 1), (1, 2), (2, 3)]

    def test_enumerated_orphan_arm(self):
        with pytest.raises(CapabilityError):
            Enumerated([[0], [2]]).initial_cover()

    def test_path_has_no_cover(self):
        with pytest.raises(CapabilityError):
            Path(TRIANGLE, 0, 2).initial_cover()


class TestOptimality:
    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_against_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        for space in (MSets(6, 3), Partition(6, 2), Matching(4), Enumerated([[0, 2], [1], [1, 3, 4]])):
            w = rng.normal(size=space.n)
            assert linear_reward(space.oracle(w), w) == brute_best(space, w)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_path_against_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        space = Path(random_graph(rng, 6), 0, 5)
        w = -rng.random(space.n)
        assert linear_reward(space.oracle(w), w) == pytest.approx(brute_best(space, w), abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 3))
    def test_shift_along_chosen_action(self, seed, delta):
        rng = np.random.default_rng(seed)
        for space in (MSets(6, 3), Matching(3)):
            w = rng.normal(size=space.n)
            best = space.oracle(w)
            shifted = w + delta * best.incidence(space.n)
            got = space.oracle(shifted)
            assert linear_reward(got, shifted) == pytest.approx(linear_reward(best, w) + delta * len(best))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_minimize_is_argmin(self, seed):
        rng = np.random.default_rng(seed)
        space = MSets(5, 2)
        c = rng.normal(size=5)
        assert linear_reward(space.minimize(c), c) == min(linear_reward(a, c) for a in space.enumerate())


class TestRoadGraph:
    def test_shape(self):
        arcs = road_graph()
        assert len(arcs) == 170
        assert {x for a in arcs for x in a} == set(range(39))
        assert len(set(arcs)) == 170

    def test_strongly_connected(self):
        arcs = road_graph(39, 170, 3)
        for s, t in [(0, 38), (38, 0), (5, 17)]:
            Path(arcs, s, t)

    def test_seeded(self):
        assert road_graph(seed=4) == road_graph(seed=4)
        assert road_graph(seed=4) != road_graph(seed=5)

    def test_bad_arc_count(self):
        with pytest.raises(ValueError):
            road_graph(10, 15)


def test_edge_list_loader(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("% road network\n0 1\n\n1 2 7.5\n# comment\n0 2\n")
    arcs = load_edge_list(f)
    assert arcs == TRIANGLE
    assert Path(arcs, 0, 2).oracle([-0.1, -0.1, -0.3]) == (A, B)


def test_edge_list_malformed(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("0 1\n2\n")
    with pytest.raises(ValueError):
        load_edge_list(f)


def test_matching_arm_layout():
    # permutation (1, 0, 2) of K_{3,3}: edges (0,1), (1,0), (2,2)
    assert (1, 3, 8) in Matching(3).enumerate()
    assert all(sorted(a // 3 for a in act) == [0, 1, 2] for act in Matching(3).enumerate())
    assert len(list(itertools.permutations(range(3)))) == len(Matching(3).enumerate())
