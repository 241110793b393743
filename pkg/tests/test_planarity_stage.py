from __future__ import annotations

import json
import random

import pytest

from congest_planarity.engine import Engine
from congest_planarity.graph import Graph, gen_far_family, gen_random_planar
from congest_planarity.oracle import embed, enumerate_violations
from congest_planarity.planarity.labels import EndpointInfo, is_violation
from congest_planarity.planarity.stage import (
    EMBEDDING_FAILED,
    EULER_BOUND,
    VIOLATING_EDGE,
    TesterConfig,
    Verdict,
    embedding_credits,
    run_full_tester,
    run_stage2,
    run_tester,
    sample_bias,
    sample_nontree_edges,
    sample_size,
)
from congest_planarity.planarity.tree import build_bfs_tree

from .builders import complete, complete_bipartite, cycle, grid


def whole_graph_part(g: Graph) -> dict[int, int]:
    return {v: 0 for v in g.nodes()}


class TestFormulas:
    def test_sample_size(self):
        assert sample_size(100, 0.25) == 74
        assert sample_size(1, 0.5) == sample_size(3, 0.5)

    def test_sample_bias(self):
        assert sample_bias(10, 0) == 1.0
        assert sample_bias(10, 5) == 1.0
        assert sample_bias(10, 40) == 0.25

    def test_embedding_credits(self):
        assert embedding_credits(5, 32, 4) == 40
        assert embedding_credits(3, 1000, 4) == 24
        assert embedding_credits(0, 1, 4) == 0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TesterConfig(epsilon=1.0)


class TestBfsAndCounts:
    @pytest.mark.parametrize("seed", range(5))
    def test_distributed_bfs_matches_central(self, seed):
        g = gen_random_planar(50, 0.6, seed)
        eng = Engine(g, seed=seed)
        res = run_stage2(g, whole_graph_part(g), eng, TesterConfig(epsilon=0.5))
        central = build_bfs_tree(g.adjacency_map(), 0)
        tree = res.tree(0)
        assert tree.level == central.level
        assert tree.parent == central.parent
        assert sorted(tree.nontree_edges()) == sorted(central.nontree_edges())

    def test_counts_reach_every_node(self):
        g = grid(4, 5)
        res = run_stage2(g, whole_graph_part(g), Engine(g), TesterConfig(epsilon=0.5))
        for st in res.states.values():
            assert (st.n_j, st.m_j, st.mt_j) == (20, 31, 12)

    def test_labels_match_central(self):
        from congest_planarity.planarity.tree import compute_labels

        g = gen_random_planar(40, 0.8, 9)
        res = run_stage2(g, whole_graph_part(g), Engine(g), TesterConfig(epsilon=0.5))
        tree = res.tree(0)
        rot = embed(g.adjacency_map())
        central = compute_labels(tree, rot)
        assert res.labeling(0).node_label == central.node_label

    def test_k4_passes_euler(self):
        run = run_tester(complete(4), TesterConfig(epsilon=0.5))
        assert run.verdict.accepted

    def test_k5_fails_euler(self):
        g = complete(5)
        eng = Engine(g)
        run_stage2(g, whole_graph_part(g), eng, TesterConfig(epsilon=0.5))
        evidence = {out.evidence for out in eng.trace.verdicts.values()}
        assert evidence == {EULER_BOUND}
        assert list(eng.trace.verdicts) == [0]  # the part root decides

    def test_k33_fails_embedding(self):
        g = complete_bipartite(3, 3)
        eng = Engine(g)
        run_stage2(g, whole_graph_part(g), eng, TesterConfig(epsilon=0.5))
        assert [out.evidence for out in eng.trace.verdicts.values()] == [EMBEDDING_FAILED]


class TestSampling:
    @pytest.mark.parametrize("seed", range(4))
    def test_distributed_sample_matches_central(self, seed):
        g = gen_random_planar(120, 0.9, seed)
        cfg = TesterConfig(epsilon=0.9, sample_constant=0.5)
        res = run_stage2(g, whole_graph_part(g), Engine(g, seed=seed), cfg)
        tree, lab = res.tree(0), res.labeling(0)
        central = sample_nontree_edges(tree, lab, 0.9, seed, n=g.n, c_s=0.5)
        assert sorted(res.samples[0]) == sorted(central)

    def test_mean_sample_size(self):
        g = gen_random_planar(200, 1.0, 1)
        tree = build_bfs_tree(g.adjacency_map(), 0)
        from congest_planarity.planarity.tree import compute_labels

        lab = compute_labels(tree, embed(g.adjacency_map()))
        s = sample_size(g.n, 0.9, 0.5)
        sizes = [len(sample_nontree_edges(tree, lab, 0.9, seed, c_s=0.5)) for seed in range(300)]
        mean = sum(sizes) / len(sizes)
        assert tree.m_tilde > s
        assert abs(mean - s) < 0.1 * s

    def test_tree_part_samples_nothing(self):
        g = Graph(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)])
        res = run_stage2(g, whole_graph_part(g), Engine(g), TesterConfig(epsilon=0.5))
        assert res.samples == {}


class TestChecks:
    def test_recorded_checks_agree_with_oracle(self):
        rng = random.Random(5)
        total = 0
        for _ in range(40):
            n = rng.randint(5, 11)
            edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
            g = Graph(n, edges)
            if not g.is_connected() or g.m > 3 * n - 6:
                continue
            cfg = TesterConfig(epsilon=0.5, forced_embedding=True, record_checks=True)
            res = run_stage2(g, whole_graph_part(g), Engine(g), cfg)
            if res.checks is None or not res.samples:
                continue
            tree = res.tree(0)
            from congest_planarity.graph import RotationSystem

            rot = RotationSystem({v: tuple(res.states[v].order) for v in g.nodes()})
            expected = enumerate_violations(tree, rot)
            lab = res.labeling(0)
            for _part, (owner, w), desc, hit in res.checks:
                f = (min(owner, w), max(owner, w))
                e_nodes = [x for x in g.nodes() if lab.node_label[x] in (desc.lu, desc.lv)]
                e = (min(e_nodes), max(e_nodes)) if len(e_nodes) == 2 else None
                if e is None or e == f:
                    assert not hit
                    continue
                assert hit == ((f, e) in expected)
                info = (
                    EndpointInfo(lab.node_label[owner], lab.edge_label[owner][w], lab.degree[owner]),
                    EndpointInfo(lab.node_label[w], lab.edge_label[w][owner], lab.degree[w]),
                )
                assert hit == is_violation(info, desc)
                total += 1
        assert total > 50


class TestTester:
    @pytest.mark.parametrize("seed", range(8))
    def test_planar_accepts(self, seed):
        rng = random.Random(seed)
        g = gen_random_planar(rng.randint(10, 150), rng.random(), seed)
        verdict, trace = run_full_tester(g, 0.25, seed)
        assert verdict.accepted and trace.rejecting_nodes == []
        assert set(trace.verdicts) == set(g.nodes())

    def test_cycle_accepts_quickly(self):
        verdict, _ = run_full_tester(cycle(30), 0.5)
        assert verdict.accepted

    def test_k5_chain_forced_rejects(self):
        g = gen_far_family("k5-chain", 8).graph
        cfg = TesterConfig(epsilon=0.09, forced_embedding=True)
        rejected = sum(not run_tester(g, cfg, seed).verdict.accepted for seed in range(20))
        assert rejected >= 18

    def test_k5_chain_violation_detail(self):
        g = gen_far_family("k5-chain", 8).graph
        cfg = TesterConfig(epsilon=0.09, forced_embedding=True)
        for seed in range(10):
            v = run_tester(g, cfg, seed).verdict
            if not v.accepted:
                rec = v.rejecting[0]
                assert rec["evidence"] in (VIOLATING_EDGE, EULER_BOUND)
                if rec["evidence"] == VIOLATING_EDGE:
                    assert len(rec["detail"]["edge"]) == 2 and len(rec["detail"]["cycle"]) == 2
                return
        pytest.fail("no rejection in ten seeds")

    def test_verdict_json(self):
        verdict, trace = run_full_tester(complete(5), 0.5)
        data = json.loads(verdict.to_json())
        assert set(data) == {"verdict", "rejecting", "rounds", "modeled_round_credits"}
        assert data["verdict"] == "reject"
        assert {r["evidence"] for r in data["rejecting"]} <= {EULER_BOUND, "ArboricityExceeded"}
        tdata = json.loads(trace.to_json())
        assert set(tdata) == {"rounds", "max_bits", "messages", "modeled_round_credits", "verdict", "rejecting_nodes"}
        assert Verdict.from_trace(trace) == verdict

    def test_truncated_run_accepts(self):
        g = gen_random_planar(80, 0.5, 2)
        run = run_tester(g, TesterConfig(epsilon=0.5, max_rounds=10))
        assert run.truncated and run.verdict.accepted
        assert run.trace.rounds_used == 10

    def test_modeled_credits_separate(self):
        g = gen_random_planar(100, 0.5, 4)
        run = run_tester(g, TesterConfig(epsilon=0.25))
        assert run.trace.modeled_round_credits == max(run.stage2.part_credits.values())
