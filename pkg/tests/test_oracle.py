from __future__ import annotations

import random

import networkx as nx
import pytest

from congest_planarity.graph import Graph, RotationSystem, gen_random_planar
from congest_planarity.oracle import (
    AtLeast,
    IntractableInstance,
    decompose_cycle,
    distance_to_cycle_freeness,
    distance_to_planarity,
    embed,
    enumerate_violations,
    fundamental_cycle,
    is_bipartite,
    is_forest,
    is_planar,
    kuratowski_planar,
    planar,
    stretch,
    verify_partition,
)
from congest_planarity.planarity.tree import build_bfs_tree

from .builders import complete, complete_bipartite, cycle, grid, path


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def random_connected(n: int, p: float, rng: random.Random) -> Graph:
    while True:
        g = random_graph(n, p, rng)
        if g.is_connected():
            return g


class TestPlanarity:
    def test_k4(self):
        ok, emb = is_planar(complete(4))
        assert ok and emb is not None and emb.face_count == 4

    @pytest.mark.parametrize("g", [complete(5), complete_bipartite(3, 3)], ids=["K5", "K33"])
    def test_kuratowski_graphs(self, g):
        assert is_planar(g) == (False, None)

    def test_agrees_with_minor_search_on_atlas(self):
        for G in nx.graph_atlas_g()[1:]:
            g = Graph(G.number_of_nodes(), G.edges())
            assert planar(g) == kuratowski_planar(g), sorted(G.edges())

    def test_agrees_with_minor_search_on_eight_nodes(self):
        rng = random.Random(8)
        for _ in range(60):
            g = random_graph(8, rng.uniform(0.3, 0.6), rng)
            assert planar(g) == kuratowski_planar(g)

    def test_agrees_with_networkx(self):
        rng = random.Random(1)
        for _ in range(400):
            n = rng.randint(1, 14)
            g = random_graph(n, rng.uniform(0.1, 0.7), rng)
            assert planar(g) == nx.check_planarity(g.to_networkx())[0]

    def test_every_embedding_satisfies_euler(self):
        rng = random.Random(2)
        for i in range(100):
            g = gen_random_planar(rng.randint(1, 60), rng.random(), i)
            ok, emb = is_planar(g)
            assert ok and emb is not None
            assert emb.rotation.euler_characteristic_ok()
            darts = [d for face in emb.faces for d in face]
            assert len(darts) == len(set(darts)) == 2 * g.m

    def test_disconnected_graph(self):
        g = Graph(8, [(0, 1), (1, 2), (2, 0), (4, 5)])
        ok, emb = is_planar(g)
        assert ok and emb.rotation.euler_characteristic_ok()


class TestDistances:
    def test_planar_is_zero(self):
        assert distance_to_planarity(grid(3, 3), 3) == 0

    def test_k5(self):
        assert distance_to_planarity(complete(5), 3) == 1

    def test_k6(self):
        assert distance_to_planarity(complete(6), 3) == 3

    def test_cap_reached(self):
        assert distance_to_planarity(complete(6), 2) == AtLeast(3)

    def test_guard(self):
        g = gen_random_planar(40, 1.0, 0)
        with pytest.raises(IntractableInstance):
            distance_to_planarity(g, 4)

    def test_simple_properties(self):
        assert is_bipartite(cycle(6)) and not is_bipartite(cycle(5))
        assert is_forest(path(5)) and not is_forest(cycle(3))
        assert distance_to_cycle_freeness(complete(4)) == 3


def dmp_rotation(g: Graph) -> RotationSystem:
    rot = embed(g.adjacency_map())
    assert rot is not None
    return rot


def sorted_rotation(g: Graph) -> RotationSystem:
    return RotationSystem({v: g.neighbors(v) for v in g.nodes()})


class TestViolations:
    def test_planar_with_dmp_has_none(self):
        rng = random.Random(3)
        for i in range(60):
            g = gen_random_planar(rng.randint(3, 40), rng.random(), i)
            tree = build_bfs_tree(g.adjacency_map(), rng.randrange(g.n))
            assert enumerate_violations(tree, dmp_rotation(g)) == set()

    def test_k5_always_has_violations(self):
        g = complete(5)
        rng = random.Random(4)
        for root in g.nodes():
            tree = build_bfs_tree(g.adjacency_map(), root)
            for _ in range(10):
                rot = RotationSystem({v: tuple(rng.sample(g.neighbors(v), 4)) for v in g.nodes()})
                assert enumerate_violations(tree, rot)

    def test_single_nontree_edge(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        tree = build_bfs_tree(g.adjacency_map(), 0)
        assert len(tree.nontree_edges()) == 1
        assert enumerate_violations(tree, sorted_rotation(g)) == set()

    def test_fundamental_cycle_shape(self):
        g = cycle(6)
        tree = build_bfs_tree(g.adjacency_map(), 0)
        (u, v) = tree.nontree_edges()[0]
        cyc = fundamental_cycle(tree, u, v)
        assert cyc.top == 0 and sorted(cyc.nodes) == list(range(6))


class TestDecomposition:
    def test_bare_cycle(self):
        g = cycle(5)
        tree = build_bfs_tree(g.adjacency_map(), 0)
        e = tree.nontree_edges()[0]
        inner, outer = decompose_cycle(tree, sorted_rotation(g), e)
        assert inner == outer == set(g.edges)

    def test_sides_are_planar_implies_whole_is_planar(self):
        rng = random.Random(5)
        checked = 0
        while checked < 300:
            n = rng.randint(4, 9)
            if rng.random() < 0.5:
                g = gen_random_planar(n, rng.random(), rng.randrange(10**6))
                rot = dmp_rotation(g)
            else:
                g = random_connected(n, rng.uniform(0.3, 0.7), rng)
                rot = sorted_rotation(g)
            tree = build_bfs_tree(g.adjacency_map(), rng.randrange(n))
            if not tree.nontree_edges() or enumerate_violations(tree, rot):
                continue
            checked += 1
            for e in tree.nontree_edges():
                inner, outer = decompose_cycle(tree, rot, e)
                assert inner | outer == set(g.edges)
                if planar(Graph(g.n, inner)) and planar(Graph(g.n, outer)):
                    assert planar(g)


class TestVerifyPartition:
    def test_singletons(self):
        g = grid(3, 4)
        rep = verify_partition(g, {v: v for v in g.nodes()})
        assert rep.cut_edges == g.m and rep.max_diameter == 0 and rep.part_count == g.n

    def test_one_part(self):
        g = grid(3, 4)
        tree = build_bfs_tree(g.adjacency_map(), 0)
        rep = verify_partition(g, {v: 0 for v in g.nodes()}, tree.parent)
        assert rep.cut_edges == 0 and rep.max_diameter == 5
        assert rep.all_connected and rep.all_trees_valid

    def test_detects_disconnected_part_and_bad_tree(self):
        g = path(4)
        rep = verify_partition(g, {0: 0, 1: 1, 2: 1, 3: 0})
        assert not rep.all_connected
        rep = verify_partition(g, {v: 0 for v in g.nodes()}, {0: None, 1: 0, 2: 0, 3: 2})
        assert not rep.all_trees_valid


class TestStretch:
    def test_identity(self):
        g = grid(3, 3)
        assert stretch(g, g.edges) == 1

    def test_cycle_minus_edge(self):
        g = cycle(6)
        assert stretch(g, [e for e in g.edges if e != (0, 5)]) == 5

    def test_disconnected_spanner(self):
        assert stretch(path(3), [(0, 1)]) == float("inf")
