"""Partitioning under a minor-free promise, and the testers and spanner built on it.

The deterministic partitioner is the planarity tester's partition stage with
rejection kept only as a promise violation. The randomized one replaces the
peeling orientation by weighted edge selection from uniform boundary-edge
draws, so its round count has no log n term from the orientation.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Literal

from .engine import Engine, NodeContext, Reject, Step, Trace
from .graph.core import Graph, norm_edge
from .partition.stage import (
    Partitioner,
    PartitionState,
    PhaseConfig,
    Stage1Result,
    _result,
    marked_edges,
    phase_count,
    three_color,
)
from .planarity.stage import S2, BuildBfs, Verdict, accept_remaining, finish_bfs

CutTarget = Literal["n", "m"]

NON_TREE_EDGE = "NonTreeEdge"
ODD_CYCLE = "OddCycle"
TESTER_CUT_FACTOR = 0.9


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def effective_epsilon(g: Graph, epsilon: float, cut_target: CutTarget) -> float:
    """Scale epsilon so that a cut of at most ``eps_eff * m / 2`` meets the requested target.

    With target ``m`` the cut bound is ``epsilon * m / 2``; with target ``n``
    it is ``epsilon * n``, reached by ``eps_eff = epsilon * min(1, 2n/m)``.
    """
    if cut_target == "m" or g.m == 0:
        return epsilon
    return epsilon * min(1.0, 2.0 * g.n / g.m)


def cut_bound(g: Graph, epsilon: float, cut_target: CutTarget) -> float:
    return epsilon * g.n if cut_target == "n" else epsilon * g.m / 2


@dataclass(frozen=True)
class RandomizedPhaseConfig:
    epsilon: float
    delta: float
    alpha: int = 3
    c_t: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.epsilon < 1 or not 0 < self.delta < 1:
            raise ValueError("epsilon and delta must lie in (0, 1)")

    @property
    def s_trials(self) -> int:
        return max(1, math.ceil(self.c_t * math.log(1.0 / self.delta)))

    @property
    def phases(self) -> int:
        """Smallest t with (1 - 1/(64 alpha))^t <= epsilon / 2."""
        a = 64 * self.alpha
        return math.ceil(math.log(2.0 / self.epsilon) / math.log(a / (a - 1)))


# ---------------------------------------------------------------------------
# partitioners
# ---------------------------------------------------------------------------


def run_partition_deterministic(
    g: Graph,
    epsilon: float,
    alpha: int = 3,
    cut_target: CutTarget = "n",
    seed: int = 0,
    instrument: bool = False,
    engine: Engine | None = None,
) -> Stage1Result:
    eng = engine if engine is not None else Engine(g, seed=seed)
    eps = effective_epsilon(g, epsilon, cut_target)
    part = Partitioner(g, eng, alpha=alpha, mode="deterministic", instrument=instrument)
    cfg = PhaseConfig.build(eps, alpha, g.n)
    rejected, done = part.run(cfg.t)
    return _result(g, part, cfg, rejected, done)


def run_partition_randomized(
    g: Graph,
    epsilon: float,
    delta: float,
    seed: int = 0,
    alpha: int = 3,
    cut_target: CutTarget = "n",
    instrument: bool = False,
    engine: Engine | None = None,
    c_t: float = 1.0,
) -> Stage1Result:
    eps = effective_epsilon(g, epsilon, cut_target)
    rcfg = RandomizedPhaseConfig(min(eps, 0.999), delta, alpha, c_t)
    eng = engine if engine is not None else Engine(g, seed=seed)
    part = Partitioner(g, eng, alpha=alpha, mode="randomized", s_trials=rcfg.s_trials, instrument=instrument)
    rejected, done = part.run(rcfg.phases)
    cfg = PhaseConfig(eps, alpha, rcfg.phases, 0)
    return _result(g, part, cfg, rejected, done)


def weighted_edge_selection(
    g: Graph, state: PartitionState, s_trials: int, seed: int = 0
) -> dict[int, tuple[int, int] | None]:
    """One selection step from a given partition: per part, the heaviest contracted edge among the draws.

    Returns ``part -> (target part, weight)``; mutual selections are kept on
    both sides here (deduplication happens during designation).
    """
    eng = Engine(g, seed=seed)
    part = Partitioner(g, eng, mode="randomized", s_trials=s_trials)
    part.load_state(state)
    for st in part.roots():
        st.r_sel = None
        st.r_draws = None
    part.weighted_selection()
    return {st.id: st.r_sel for st in part.roots()}


def uniform_incident_edge(
    g: Graph, state: PartitionState, seed: int = 0, trials: int = 1
) -> dict[int, list[tuple[int, int]]]:
    """Per part, ``trials`` uniformly random graph edges leaving it, as (inside, outside) pairs."""
    eng = Engine(g, seed=seed)
    part = Partitioner(g, eng, mode="randomized")
    part.load_state(state)
    return part.uniform_draws(trials)


def convergecast_draw_distribution(
    children: Mapping[int, list[int]], root: int, out_degree: Mapping[int, int]
) -> dict[int, float]:
    """Exact probability that the draw of a part ends at each member node.

    Follows the convergecast rule: every node picks among its own outgoing
    edges and its children's candidates in proportion to the edge counts
    they represent.
    """
    total: dict[int, int] = {}

    def count(x: int) -> int:
        total[x] = out_degree.get(x, 0) + sum(count(c) for c in children.get(x, []))
        return total[x]

    count(root)
    prob: dict[int, float] = {}

    def spread(x: int, p: float) -> None:
        if total[x] == 0:
            return
        prob[x] = p * out_degree.get(x, 0) / total[x]
        for c in children.get(x, []):
            spread(c, p * total[c] / total[x])

    spread(root, 1.0)
    return prob


def pseudo_forest_marking(
    parent: dict[int, int | None], weight: dict[int, int]
) -> tuple[dict[int, int], set[tuple[int, int]]]:
    """Drop mutual picks, three-color, and mark; returns colors and marked (child, parent) edges."""
    par = dict(parent)
    for x, p in parent.items():
        if p is not None and parent.get(p) == x and x > p:
            par[x] = None
    colors = three_color(par)
    return colors, marked_edges(par, weight, colors)


def is_acyclic(edges: set[tuple[int, int]]) -> bool:
    """Whether the undirected graph on ``edges`` is a forest."""
    root: dict[int, int] = {}

    def find(x: int) -> int:
        root.setdefault(x, x)
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    seen = set()
    for a, b in edges:
        key = norm_edge(a, b)
        if key in seen:
            continue
        seen.add(key)
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        root[ra] = rb
    return True


# ---------------------------------------------------------------------------
# applications
# ---------------------------------------------------------------------------


class LocalCheck:
    """Each node inspects the non-tree edges it owns in its part's BFS tree."""

    def __init__(self, odd_only: bool) -> None:
        self.odd_only = odd_only

    def step(self, ctx: NodeContext, st: S2, inbox: dict) -> Step:
        for w in st.owned:
            if not self.odd_only:
                return Step(st, None, Reject(NON_TREE_EDGE, {"edge": list(norm_edge(st.id, w))}))
            if (st.level - st.nbr_level[w]) % 2 == 0:
                return Step(st, None, Reject(ODD_CYCLE, {"edge": list(norm_edge(st.id, w))}))
        return Step(st)


@dataclass
class AppRun:
    verdict: Verdict
    trace: Trace
    partition: Stage1Result
    states: dict[int, S2]


def _partition_for_app(
    g: Graph, epsilon: float, delta: float | None, seed: int, engine: Engine, alpha: int
) -> Stage1Result:
    eps = TESTER_CUT_FACTOR * epsilon
    if delta is None:
        return run_partition_deterministic(g, eps, alpha=alpha, cut_target="m", engine=engine)
    return run_partition_randomized(g, eps, delta, seed=seed, alpha=alpha, cut_target="m", engine=engine)


def _part_bfs(g: Graph, part_of: Mapping[int, int], engine: Engine) -> dict[int, S2]:
    states = {v: S2(v, part_of[v], [w for w in g.neighbors(v) if part_of[w] == part_of[v]]) for v in g.nodes()}
    engine.execute(BuildBfs(), states, start=sorted({part_of[v] for v in g.nodes()}))
    for st in states.values():
        finish_bfs(st)
    return states


def _run_property_tester(
    g: Graph, epsilon: float, delta: float | None, seed: int, odd_only: bool, alpha: int
) -> AppRun:
    engine = Engine(g, seed=seed)
    part = _partition_for_app(g, epsilon, delta, seed, engine, alpha)
    states: dict[int, S2] = {}
    if not part.rejected:
        states = _part_bfs(g, part.state.part_of, engine)
        engine.execute(LocalCheck(odd_only), states)
    accept_remaining(g, engine)
    return AppRun(Verdict.from_trace(engine.trace), engine.trace, part, states)


def test_cycle_free(
    g: Graph, epsilon: float, delta: float | None = None, seed: int = 0, alpha: int = 3
) -> AppRun:
    """Partition with a slightly smaller cut, then reject iff some part has a non-tree edge."""
    return _run_property_tester(g, epsilon, delta, seed, odd_only=False, alpha=alpha)


def test_bipartite(
    g: Graph, epsilon: float, delta: float | None = None, seed: int = 0, alpha: int = 3
) -> AppRun:
    """Reject iff some part has a non-tree edge between BFS levels of equal parity."""
    return _run_property_tester(g, epsilon, delta, seed, odd_only=True, alpha=alpha)


# pytest would otherwise try to collect the two testers when they are imported into test modules
test_cycle_free.__test__ = False  # type: ignore[attr-defined]
test_bipartite.__test__ = False  # type: ignore[attr-defined]


@dataclass
class SpannerResult:
    edges: list[tuple[int, int]]
    partition: Stage1Result
    tree_edges: int
    cut_edges: int
    trace: Trace

    @property
    def graph_size(self) -> int:
        return len(self.edges)

    def as_graph(self, n: int) -> Graph:
        return Graph(n, self.edges)


def build_spanner(
    g: Graph, epsilon: float, delta: float | None = None, seed: int = 0, alpha: int = 3
) -> SpannerResult:
    """Part BFS trees plus every cut edge."""
    engine = Engine(g, seed=seed)
    if delta is None:
        part = run_partition_deterministic(g, epsilon, alpha=alpha, cut_target="n", engine=engine)
    else:
        part = run_partition_randomized(g, epsilon, delta, seed=seed, alpha=alpha, cut_target="n", engine=engine)
    if part.rejected:
        raise ValueError("partitioning rejected: the input breaks the minor-free promise")
    part_of = part.state.part_of
    states = _part_bfs(g, part_of, engine)
    tree = {norm_edge(v, st.parent) for v, st in states.items() if st.parent is not None}
    cut = {e for e in g.edges if part_of[e[0]] != part_of[e[1]]}
    return SpannerResult(sorted(tree | cut), part, len(tree), len(cut), engine.trace)


__all__ = [
    "NON_TREE_EDGE",
    "ODD_CYCLE",
    "AppRun",
    "CutTarget",
    "RandomizedPhaseConfig",
    "SpannerResult",
    "build_spanner",
    "convergecast_draw_distribution",
    "cut_bound",
    "effective_epsilon",
    "is_acyclic",
    "phase_count",
    "pseudo_forest_marking",
    "run_partition_deterministic",
    "run_partition_randomized",
    "test_bipartite",
    "test_cycle_free",
    "uniform_incident_edge",
    "weighted_edge_selection",
]
