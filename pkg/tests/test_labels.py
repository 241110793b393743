from __future__ import annotations

import random
from itertools import permutations

import pytest

from congest_planarity.graph import Graph, RotationSystem, gen_random_planar
from congest_planarity.oracle import (
    embed,
    enumerate_violations,
    fundamental_cycle,
    node_sides,
)
from congest_planarity.planarity.labels import (
    EndpointInfo,
    Order,
    Side,
    classify_point,
    edge_side_at_cycle_node,
    is_violation,
    lex_compare,
    make_descriptor,
)
from congest_planarity.planarity.tree import (
    build_bfs_tree,
    compute_labels,
    local_edge_labels,
)

from .builders import complete, cycle


def endpoint(lab, x, w) -> EndpointInfo:
    return EndpointInfo(lab.node_label[x], lab.edge_label[x][w], lab.degree[x])


def descriptor(lab, u, v):
    return make_descriptor(endpoint(lab, u, v), endpoint(lab, v, u))


def random_instance(rng: random.Random, forced: bool):
    """A connected graph, a BFS tree and a rotation system (planar or arbitrary)."""
    while True:
        n = rng.randint(3, 11)
        if forced:
            edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < rng.uniform(0.25, 0.6)]
            g = Graph(n, edges)
            if not g.is_connected():
                continue
            rot = RotationSystem({v: tuple(rng.sample(g.neighbors(v), g.degree(v))) for v in g.nodes()})
        else:
            g = gen_random_planar(n, rng.random(), rng.randrange(10**6))
            rot = embed(g.adjacency_map())
        tree = build_bfs_tree(g.adjacency_map(), rng.randrange(n))
        return g, tree, rot


class TestBfsTree:
    def test_single_node(self):
        tree = build_bfs_tree({0: []}, 0)
        assert tree.m_tilde == 0 and tree.depth == 0

    def test_triangle(self):
        g = cycle(3)
        tree = build_bfs_tree(g.adjacency_map(), 0)
        assert [tree.level[v] for v in range(3)] == [0, 1, 1]
        assert tree.nontree_edges() == [(1, 2)]
        assert tree.owner(1, 2) == 1

    @pytest.mark.parametrize("root", range(4))
    def test_four_cycle(self, root):
        g = cycle(4)
        tree = build_bfs_tree(g.adjacency_map(), root)
        (e,) = tree.nontree_edges()
        far = (root + 2) % 4
        assert tree.owner(*e) == far and tree.level[far] == 2

    def test_levels_increase_by_one(self):
        g = gen_random_planar(80, 0.7, 4)
        tree = build_bfs_tree(g.adjacency_map(), 5)
        for v, p in tree.parent.items():
            if p is not None:
                assert tree.level[v] == tree.level[p] + 1
                assert p == min(w for w in g.neighbors(v) if tree.level[w] == tree.level[v] - 1)


class TestLabels:
    def test_root_labels_follow_rotation(self):
        assert local_edge_labels((7, 8, 9), 7) == {7: 1, 8: 2, 9: 3}

    def test_child_labels_start_at_parent(self):
        assert local_edge_labels(("a", "p", "b"), "p") == {"p": 1, "b": 2, "a": 3}

    def test_labels_are_paths_and_prefixes_mean_descendants(self):
        rng = random.Random(0)
        for _ in range(30):
            g, tree, rot = random_instance(rng, forced=rng.random() < 0.5)
            lab = compute_labels(tree, rot)
            for x in tree.nodes:
                walk = []
                for a, b in zip(tree.path_to_root(x)[::-1], tree.path_to_root(x)[::-1][1:]):
                    walk.append(lab.edge_label[a][b])
                assert lab.node_label[x] == tuple(walk)
                for u in tree.nodes:
                    assert lab.is_descendant(x, u) == (u in tree.path_to_root(x))
            for x in tree.nodes:
                assert sorted(lab.edge_label[x].values()) == list(range(1, g.degree(x) + 1))
                if tree.parent[x] is not None:
                    assert lab.edge_label[x][tree.parent[x]] == 1


class TestOrder:
    def test_root_smallest(self):
        assert lex_compare((), (1,)) is Order.LT

    def test_prefix_smaller(self):
        assert lex_compare((2, 1), (2, 1, 3)) is Order.LT

    def test_symbol_comparison(self):
        assert lex_compare((1, 3), (1, 2, 9)) is Order.GT

    def test_equal(self):
        assert lex_compare((4,), (4,)) is Order.EQ


class TestEdgeSide:
    def test_examples(self):
        assert edge_side_at_cycle_node(4, 1, 3, 2) is Side.INSIDE
        assert edge_side_at_cycle_node(4, 1, 3, 4) is Side.OUTSIDE

    @pytest.mark.parametrize("k", range(3, 9))
    def test_rotation_invariance(self, k):
        for a, b, c in permutations(range(1, k + 1), 3):
            base = edge_side_at_cycle_node(k, a, b, c)
            for shift in range(1, k):
                rot = [(x - 1 + shift) % k + 1 for x in (a, b, c)]
                assert edge_side_at_cycle_node(k, *rot) is base

    @pytest.mark.parametrize("args", [(4, 1, 1, 2), (4, 1, 3, 3), (4, 1, 3, 5), (4, 0, 2, 3)])
    def test_precondition(self, args):
        with pytest.raises(ValueError):
            edge_side_at_cycle_node(*args)


SIDE_NAME = {Side.INSIDE: "inside", Side.OUTSIDE: "outside", Side.ON_CYCLE: "on_cycle"}


class TestClassification:
    def test_bullet_one(self):
        # u=(1,), v=(3,): any x strictly between that is not below u is inside
        desc = make_descriptor(EndpointInfo((1,), 2, 2), EndpointInfo((3,), 2, 2))
        assert classify_point((2,), desc) is Side.INSIDE
        assert classify_point((2, 5, 1), desc) is Side.INSIDE

    def test_bullet_three(self):
        desc = make_descriptor(EndpointInfo((1,), 2, 2), EndpointInfo((3,), 3, 4))
        assert classify_point((3, 2), desc) is Side.INSIDE
        assert classify_point((3, 4), desc) is Side.OUTSIDE

    def test_on_cycle(self):
        desc = make_descriptor(EndpointInfo((1, 2), 2, 2), EndpointInfo((1, 3, 1), 3, 3))
        assert classify_point((1,), desc) is Side.ON_CYCLE
        assert classify_point((1, 3), desc) is Side.ON_CYCLE
        assert classify_point((), desc) is Side.OUTSIDE

    def test_sides_match_first_principles(self):
        rng = random.Random(1)
        for _ in range(120):
            _g, tree, rot = random_instance(rng, forced=rng.random() < 0.5)
            lab = compute_labels(tree, rot)
            for u, v in tree.nontree_edges():
                if lab.node_label[v] < lab.node_label[u]:
                    u, v = v, u
                desc = descriptor(lab, u, v)
                sides = node_sides(tree, rot, fundamental_cycle(tree, u, v))
                for x in tree.nodes:
                    assert SIDE_NAME[classify_point(lab.node_label[x], desc)] == sides[x]

    def test_nine_node_drawing(self):
        # 0 is the root; u=3 and v=6 close a cycle 0-1-3-6-4-0; x nodes hang on either side
        g = Graph(9, [(0, 1), (0, 4), (1, 3), (4, 6), (3, 6), (1, 2), (0, 5), (4, 7), (6, 8), (2, 5)])
        rot = embed(g.adjacency_map())
        tree = build_bfs_tree(g.adjacency_map(), 0)
        lab = compute_labels(tree, rot)
        for u, v in tree.nontree_edges():
            if lab.node_label[v] < lab.node_label[u]:
                u, v = v, u
            desc = descriptor(lab, u, v)
            sides = node_sides(tree, rot, fundamental_cycle(tree, u, v))
            for x in g.nodes():
                assert SIDE_NAME[classify_point(lab.node_label[x], desc)] == sides[x]


class TestViolation:
    def test_planar_parts_have_none(self):
        rng = random.Random(2)
        for _ in range(80):
            _g, tree, rot = random_instance(rng, forced=False)
            lab = compute_labels(tree, rot)
            nontree = tree.nontree_edges()
            for e in nontree:
                desc = descriptor(lab, *e)
                for a, b in nontree:
                    assert not is_violation((endpoint(lab, a, b), endpoint(lab, b, a)), desc)

    def test_k5_forced_has_some(self):
        g = complete(5)
        tree = build_bfs_tree(g.adjacency_map(), 0)
        rot = RotationSystem({v: g.neighbors(v) for v in g.nodes()})
        lab = compute_labels(tree, rot)
        nontree = tree.nontree_edges()
        hits = [
            (f, e)
            for e in nontree
            for f in nontree
            if is_violation((endpoint(lab, *f), endpoint(lab, f[1], f[0])), descriptor(lab, *e))
        ]
        assert hits

    def test_agrees_with_enumeration(self):
        rng = random.Random(3)
        for _ in range(200):
            _g, tree, rot = random_instance(rng, forced=True)
            lab = compute_labels(tree, rot)
            expected = enumerate_violations(tree, rot)
            nontree = tree.nontree_edges()
            for e in nontree:
                desc = descriptor(lab, *e)
                for f in nontree:
                    got = is_violation((endpoint(lab, *f), endpoint(lab, f[1], f[0])), desc)
                    assert got == ((f, e) in expected)

    def test_chord_leaving_on_both_sides(self):
        # cycle 0-1-2-3 closed by (2,3); chord (1,3) drawn inside at 1 but outside at 3
        g = Graph(5, [(0, 1), (1, 2), (0, 3), (2, 3), (1, 3), (0, 4)])
        tree = build_bfs_tree(g.adjacency_map(), 0)
        for order3 in ((0, 1, 2), (0, 2, 1)):
            rot = RotationSystem({0: (1, 3, 4), 1: (0, 2, 3), 2: (1, 3), 3: order3, 4: (0,)})
            lab = compute_labels(tree, rot)
            expected = enumerate_violations(tree, rot)
            nontree = tree.nontree_edges()
            for e in nontree:
                for f in nontree:
                    got = is_violation((endpoint(lab, *f), endpoint(lab, f[1], f[0])), descriptor(lab, *e))
                    assert got == ((f, e) in expected)

    def test_same_edge_is_not_a_violation(self):
        desc = make_descriptor(EndpointInfo((1,), 2, 3), EndpointInfo((2,), 2, 3))
        assert not is_violation((EndpointInfo((2,), 2, 3), EndpointInfo((1,), 2, 3)), desc)
