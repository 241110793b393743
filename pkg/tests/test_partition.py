from __future__ import annotations

import random

import pytest

from congest_planarity.graph import Graph, gen_far_family, gen_random_planar
from congest_planarity.oracle.metrics import verify_partition
from congest_planarity.partition.stage import (
    ARBORICITY_EXCEEDED,
    MARK_ALL_IN,
    MARK_IN_FROM_3,
    MARK_NONE,
    AuxWeightedGraph,
    PartitionState,
    cv_iterations,
    cv_reduce,
    fd_rounds,
    mark_decision,
    marked_edges,
    phase_count,
    run_stage1,
    three_color,
)

from .builders import complete, grid, path


class TestConstants:
    @pytest.mark.parametrize("eps,expected", [(1.0, 25), (0.5, 50), (0.25, 74)])
    def test_phase_count(self, eps, expected):
        assert phase_count(eps, 3) == expected

    def test_phase_count_is_minimal(self):
        for eps in (0.9, 0.3, 0.05):
            t = phase_count(eps, 3)
            q = 1 - 1 / 36
            assert q**t <= eps / 2 < q ** (t - 1)

    def test_phase_count_rejects_bad_input(self):
        with pytest.raises(ValueError):
            phase_count(0, 3)

    @pytest.mark.parametrize("n,expected", [(1, 1), (2, 3), (10, 7), (1000, 19)])
    def test_fd_rounds(self, n, expected):
        assert fd_rounds(n) == expected

    def test_cv_iterations_small(self):
        assert cv_iterations(6) == 0
        assert cv_iterations(7) >= 1


def random_pseudo_forest(rng: random.Random, n: int) -> dict[int, int | None]:
    """Out-degree at most one with no 2-cycles (a rooted forest plus no cycles)."""
    order = list(range(n))
    rng.shuffle(order)
    parent: dict[int, int | None] = {}
    for i, x in enumerate(order):
        parent[x] = None if i == 0 or rng.random() < 0.2 else order[rng.randrange(i)]
    return parent


class TestColoring:
    def test_cv_reduce_distinguishes_from_parent(self):
        # a proper chain c -> p -> gp stays proper after one reduction
        for c in range(40):
            for p in range(40):
                for gp in range(40):
                    if c != p and p != gp:
                        assert cv_reduce(c, p) != cv_reduce(p, gp)
        assert cv_reduce(6, None) == 0 and cv_reduce(7, None) == 1

    @pytest.mark.parametrize("seed", range(20))
    def test_three_color_proper(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 300)
        parent = random_pseudo_forest(rng, n)
        colors = three_color(parent)
        assert set(colors.values()) <= {0, 1, 2}
        for x, p in parent.items():
            if p is not None:
                assert colors[x] != colors[p]

    def test_path_long_ids(self):
        parent = {i: (i + 1 if i < 999 else None) for i in range(1000)}
        colors = three_color(parent)
        assert all(colors[i] != colors[i + 1] for i in range(999))


class TestMarking:
    def test_color0_prefers_heavier_out(self):
        assert mark_decision(0, 1, 5, 4, 0) == (True, MARK_NONE)
        assert mark_decision(0, 1, 3, 4, 0) == (False, MARK_ALL_IN)
        assert mark_decision(0, None, None, 0, 0) == (False, MARK_ALL_IN)

    def test_color1_only_towards_color2(self):
        assert mark_decision(1, 2, 5, 9, 4) == (True, MARK_NONE)
        assert mark_decision(1, 0, 5, 0, 0) == (False, MARK_IN_FROM_3)
        assert mark_decision(1, 2, 3, 9, 4) == (False, MARK_IN_FROM_3)

    def test_color2_marks_nothing(self):
        assert mark_decision(2, 0, 100, 0, 0) == (False, MARK_NONE)

    @pytest.mark.parametrize("seed", range(30))
    def test_marked_keeps_a_third_and_is_star_forest(self, seed):
        rng = random.Random(seed)
        n = rng.randint(2, 120)
        parent = random_pseudo_forest(rng, n)
        weight = {x: rng.randint(1, 20) for x in parent}
        colors = three_color(parent)
        marked = marked_edges(parent, weight, colors)
        total = sum(weight[x] for x, p in parent.items() if p is not None)
        kept = sum(weight[x] for x, _ in marked)
        assert 3 * kept >= total
        # no marked path of length three: contracted pieces have radius at most one hop per side
        out = {x: p for x, p in marked}
        heads = {p for _, p in marked}
        for x, p in marked:
            assert not (p in out and out[p] in out and x in heads)


class TestState:
    def test_singletons(self):
        st = PartitionState.singletons(3)
        assert st.roots == [0, 1, 2]
        assert st.parts() == {0: [0], 1: [1], 2: [2]}

    def test_aux_weights(self):
        g = Graph(4, [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)])
        aux = AuxWeightedGraph.from_partition(g, {0: 0, 1: 0, 2: 2, 3: 2})
        assert aux.weights == {(0, 2): 3}
        assert aux.neighbors(2) == {0: 3}
        assert aux.total_weight == 3


def check_stage1(g: Graph, eps: float):
    res, eng = run_stage1(g, eps, instrument=True)
    assert not res.rejected
    assert eng.trace.max_message_bits <= eng.trace.budget_bits * eng.trace.max_inflation
    report = verify_partition(g, res.state.part_of, res.state.parent)
    assert report.all_connected and report.all_trees_valid
    assert report.cut_edges == res.cut_weight
    assert res.cut_weight <= eps * g.m / 2
    for s in res.phase_stats:
        assert s.trees_ok and s.diameters_ok
        assert s.aux_faithful in (True, None)
        assert 36 * s.w_after <= 35 * s.w_before or s.w_before == 0
    return res


class TestStage1:
    @pytest.mark.parametrize("seed", range(6))
    def test_random_planar(self, seed):
        rng = random.Random(seed)
        g = gen_random_planar(rng.randint(20, 120), rng.random(), seed)
        check_stage1(g, 0.25)

    def test_grid(self):
        check_stage1(grid(8, 8), 0.5)

    def test_path_merges_to_few_parts(self):
        res = check_stage1(path(40), 0.5)
        assert res.cut_weight <= 5

    def test_edgeless(self):
        res, _ = run_stage1(Graph(5, []), 0.5)
        # one phase is spent discovering that every node is isolated
        assert res.phases_run == 1 and res.cut_weight == 0

    def test_dense_graph_rejected(self):
        res, eng = run_stage1(complete(12), 0.5)
        assert res.rejected and res.rejecting_roots
        assert {out.evidence for out in eng.trace.verdicts.values() if out != "accept"} == {ARBORICITY_EXCEEDED}

    def test_far_family_partitions(self):
        g = gen_far_family("k5-chain", 6).graph
        res, _ = run_stage1(g, 0.25)
        assert not res.rejected

    def test_dump_shape(self):
        g = gen_random_planar(30, 0.5, 1)
        res, _ = run_stage1(g, 0.5)
        dump = res.dump(g)
        assert sorted(v for p in dump["parts"] for v in p["members"]) == list(range(30))
        assert dump["cut_edges"] == res.cut_weight
        assert len(dump["phase_stats"]) == res.phases_run

    def test_deterministic_across_seeds(self):
        g = gen_random_planar(60, 0.6, 3)
        a, _ = run_stage1(g, 0.25, seed=1)
        b, _ = run_stage1(g, 0.25, seed=2)
        assert a.state.part_of == b.state.part_of
