"""Per-part planarity checking on top of a partition, and the end-to-end tester.

Each part builds a BFS tree from its root, counts its nodes and edges,
obtains a rotation system, labels its nodes by tree paths, samples non-tree
edges and broadcasts their cycle descriptors. Every node then checks the
non-tree edges it owns against each descriptor and rejects on a violation.
"""

from __future__ import annotations

import json
import math
import random
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from ..engine import (
    ACCEPT,
    Chunked,
    Engine,
    NodeContext,
    Reject,
    RoundLimitExceeded,
    Step,
    Trace,
    node_seed,
)
from ..graph.core import Graph, RotationSystem
from ..oracle.planar import embed
from ..partition.stage import ARBORICITY_EXCEEDED, Stage1Result, run_stage1
from .labels import CycleDescriptor, EndpointInfo, is_violation, make_descriptor
from .tree import BfsTree, Labeling, local_edge_labels

EULER_BOUND = "EulerBound"
EMBEDDING_FAILED = "EmbeddingFailed"
VIOLATING_EDGE = "ViolatingEdge"

# message tags
OFFER, CHILD, CNT, TOT, LBL, XCH, DSC, END = 1, 2, 3, 4, 5, 6, 7, 8


@dataclass(frozen=True)
class TesterConfig:
    __test__ = False  # keeps pytest from collecting the class by its name

    epsilon: float = 0.25
    alpha: int = 3
    sample_constant: float = 4.0
    overflow_factor: int = 4
    forced_embedding: bool = False
    gh_cost_constant: int = 4
    budget_bits: int | None = None
    max_rounds: int | None = None
    record_checks: bool = False
    instrument: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")


def sample_size(n: int, epsilon: float, c_s: float = 4.0) -> int:
    return math.ceil(c_s * math.log(max(n, 3)) / epsilon)


def sample_bias(s: int, m_tilde: int) -> float:
    return 1.0 if m_tilde <= 0 else min(1.0, s / m_tilde)


def embedding_credits(depth: int, n_part: int, c_g: int = 4) -> int:
    """Modeled rounds for gathering a part at its root and sending back the rotation."""
    return c_g * (depth + min(math.ceil(math.log2(max(n_part, 1))), depth))


# ---------------------------------------------------------------------------
# node state
# ---------------------------------------------------------------------------


class S2:
    """Local memory of one node during the per-part stage."""

    def __init__(self, node: int, part: int, nbrs: list[int]) -> None:
        self.id = node
        self.part = part
        self.nbrs = nbrs
        self.level: int | None = None
        self.parent: int | None = None
        self.children: list[int] = []
        self.nbr_level: dict[int, int] = {}
        self.owned: list[int] = []
        # convergecast scratch
        self.wait = 0
        self.acc = [0, 0, 0]
        # part totals
        self.n_j = 0
        self.m_j = 0
        self.mt_j = 0
        self.active = False
        # embedding and labels
        self.order: list[int] = []
        self.edge_label: dict[int, int] = {}
        self.label: tuple[int, ...] | None = None
        self.nbr_info: dict[int, EndpointInfo] = {}
        # sampling
        self.stage = 0
        self.ends = 0
        self.end_sent = False
        self.sample: list[CycleDescriptor] = []
        self.rejected = False

    @property
    def is_root(self) -> bool:
        return self.id == self.part

    @property
    def degree(self) -> int:
        return len(self.nbrs)

    def info(self, w: int) -> EndpointInfo:
        assert self.label is not None
        return EndpointInfo(self.label, self.edge_label[w], self.degree)


# ---------------------------------------------------------------------------
# programs
# ---------------------------------------------------------------------------


class BuildBfs:
    """Flooding from each root; the smallest offering neighbor becomes parent."""

    def step(self, ctx: NodeContext, st: S2, inbox: dict) -> Step:
        send = []
        if st.level is None and st.is_root:
            st.level = 0
            send = [(w, (OFFER, 0)) for w in st.nbrs]
        offers = []
        for sender, msg in inbox.items():
            st.nbr_level[sender] = msg[1]
            if msg[0] == CHILD:
                st.children.append(sender)
            else:
                offers.append(sender)
        if st.level is None and offers:
            p = min(offers)
            st.parent = p
            st.level = st.nbr_level[p] + 1
            send = [(w, (CHILD if w == p else OFFER, st.level)) for w in st.nbrs]
        return Step(st, send)


def finish_bfs(st: S2) -> None:
    """Local bookkeeping after the flood: child order and non-tree edge ownership."""
    st.children.sort()
    tree = set(st.children)
    if st.parent is not None:
        tree.add(st.parent)
    lvl = st.level
    st.owned = sorted(
        w for w in st.nbrs if w not in tree and (st.nbr_level[w] < lvl or (st.nbr_level[w] == lvl and st.id < w))
    )


class GatherCounts:
    """Convergecast of (nodes, degree sum, owned non-tree edges), then totals back down."""

    def step(self, ctx: NodeContext, st: S2, inbox: dict) -> Step:
        send: list = []
        output = None
        if st.stage == 0:
            st.stage = 1
            st.wait = len(st.children)
            st.acc = [1, st.degree, len(st.owned)]
        for msg in inbox.values():
            if msg[0] == CNT:
                st.acc[0] += msg[1]
                st.acc[1] += msg[2]
                st.acc[2] += msg[3]
                st.wait -= 1
            else:
                _, st.n_j, st.m_j, st.mt_j, ok = msg
                st.active = bool(ok)
                send.extend((c, msg) for c in st.children)
        if st.stage == 1 and st.wait == 0:
            st.stage = 2
            if st.is_root:
                n, m, mt = st.acc[0], st.acc[1] // 2, st.acc[2]
                ok = not (n >= 3 and m > 3 * n - 6)
                st.n_j, st.m_j, st.mt_j, st.active = n, m, mt, ok
                if not ok:
                    output = Reject(EULER_BOUND, {"n": n, "m": m})
                msg = (TOT, n, m, mt, int(ok))
                send.extend((c, msg) for c in st.children)
            else:
                send.append((st.parent, (CNT, st.acc[0], st.acc[1], st.acc[2])))
        return Step(st, send, output)


class DistributeLabels:
    """Node labels travel down the tree, chunked when long."""

    def step(self, ctx: NodeContext, st: S2, inbox: dict) -> Step:
        for msg in inbox.values():
            st.label = tuple(msg[1])
        if st.label is None and st.is_root:
            st.label = ()
        if st.label is None:
            return Step(st)
        return Step(st, [(c, Chunked((LBL, st.label + (st.edge_label[c],)))) for c in st.children])


class ExchangeLabels:
    """Every node tells each part neighbor its label, the edge's label at its end, and its degree."""

    def __init__(self) -> None:
        self.started: set[int] = set()

    def step(self, ctx: NodeContext, st: S2, inbox: dict) -> Step:
        for sender, msg in inbox.items():
            st.nbr_info[sender] = EndpointInfo(tuple(msg[1]), msg[2], msg[3])
        if ctx.node in self.started:
            return Step(st)
        self.started.add(ctx.node)
        return Step(st, [(w, Chunked((XCH, st.label, st.edge_label[w], st.degree))) for w in st.nbrs])


class SampleNontree:
    """Owners flip coins for their non-tree edges; chosen descriptors stream to the root."""

    def __init__(self, s: int) -> None:
        self.s = s
        self.started: set[int] = set()

    def step(self, ctx: NodeContext, st: S2, inbox: dict) -> Step:
        send: list = []
        up = st.parent
        if ctx.node not in self.started:
            self.started.add(ctx.node)
            st.ends = 0
            st.end_sent = False
            st.sample = []
            bias = sample_bias(self.s, st.mt_j)
            for w in st.owned:
                if bias >= 1.0 or ctx.rng.random() < bias:
                    desc = make_descriptor(st.info(w), st.nbr_info[w])
                    if up is None:
                        st.sample.append(desc)
                    else:
                        send.append((up, Chunked((DSC,) + desc.as_payload())))
        for msg in inbox.values():
            if msg[0] == DSC:
                if up is None:
                    st.sample.append(CycleDescriptor(*msg[1:]))
                else:
                    send.append((up, Chunked(msg)))
            else:
                st.ends += 1
        if up is not None and not st.end_sent and st.ends == len(st.children):
            st.end_sent = True
            send.append((up, (END,)))
        return Step(st, send)


class BroadcastAndCheck:
    """Roots stream their sample down; each node checks its owned non-tree edges."""

    def __init__(self, samples: Mapping[int, list[CycleDescriptor]], recorder: list | None) -> None:
        self.samples = dict(samples)
        self.recorder = recorder

    def _check(self, st: S2, desc: CycleDescriptor) -> Any:
        for w in st.owned:
            hit = is_violation((st.info(w), st.nbr_info[w]), desc)
            if self.recorder is not None:
                self.recorder.append((st.part, (st.id, w), desc, hit))
            if hit and not st.rejected:
                st.rejected = True
                return Reject(
                    VIOLATING_EDGE,
                    {"edge": [min(st.id, w), max(st.id, w)], "cycle": [list(desc.lu), list(desc.lv)]},
                )
        return None

    def step(self, ctx: NodeContext, st: S2, inbox: dict) -> Step:
        incoming: list[CycleDescriptor] = []
        if st.is_root and ctx.node in self.samples:
            incoming = self.samples.pop(ctx.node)
        for msg in inbox.values():
            incoming.append(CycleDescriptor(*msg[1:]))
        send = []
        output = None
        for desc in incoming:
            verdict = self._check(st, desc)
            if verdict is not None:
                output = verdict
            payload = (DSC,) + desc.as_payload()
            send.extend((c, Chunked(payload)) for c in st.children)
        return Step(st, send, output)


# ---------------------------------------------------------------------------
# verdicts and results
# ---------------------------------------------------------------------------


@dataclass
class Verdict:
    verdict: str
    rejecting: list[dict]
    rounds: int
    modeled_round_credits: int

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    @classmethod
    def from_trace(cls, trace: Trace) -> Verdict:
        rejecting = [
            {"node": v, "evidence": out.evidence, "detail": out.detail}
            for v, out in sorted(trace.verdicts.items())
            if isinstance(out, Reject)
        ]
        return cls(
            "reject" if rejecting else "accept",
            rejecting,
            trace.rounds_used,
            trace.modeled_round_credits,
        )

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rejecting": self.rejecting,
            "rounds": self.rounds,
            "modeled_round_credits": self.modeled_round_credits,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class Stage2Result:
    states: dict[int, S2]
    samples: dict[int, list[CycleDescriptor]]
    overflowed: list[int]
    checks: list | None
    s: int
    part_credits: dict[int, int] = field(default_factory=dict)

    def tree(self, root: int) -> BfsTree:
        members = [v for v, st in self.states.items() if st.part == root]
        level = {v: self.states[v].level for v in members}
        parent = {v: self.states[v].parent for v in members}
        children = {v: list(self.states[v].children) for v in members}
        adjacency = {v: list(self.states[v].nbrs) for v in members}
        return BfsTree(root, level, parent, children, adjacency)  # type: ignore[arg-type]

    def labeling(self, root: int) -> Labeling:
        members = [v for v, st in self.states.items() if st.part == root]
        return Labeling(
            {v: self.states[v].label for v in members},  # type: ignore[misc]
            {v: dict(self.states[v].edge_label) for v in members},
            {v: self.states[v].degree for v in members},
        )


@dataclass
class TesterRun:
    verdict: Verdict
    trace: Trace
    stage1: Stage1Result | None
    stage2: Stage2Result | None
    truncated: bool = False


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------


def run_stage2(
    g: Graph,
    part_of: Mapping[int, int],
    engine: Engine,
    config: TesterConfig,
) -> Stage2Result:
    """Per-part BFS, counts, embedding, labels, sampling and violation checks."""
    states = {v: S2(v, part_of[v], [w for w in g.neighbors(v) if part_of[w] == part_of[v]]) for v in g.nodes()}
    roots = sorted({part_of[v] for v in g.nodes()})

    engine.execute(BuildBfs(), states, start=roots)
    for st in states.values():
        finish_bfs(st)
    engine.execute(GatherCounts(), states, start=[v for v, st in states.items() if not st.children])

    members: dict[int, list[int]] = {}
    for v in g.nodes():
        members.setdefault(part_of[v], []).append(v)

    # embedding: gathered at the root and computed there, charged as modeled rounds
    credits: dict[int, int] = {}
    live: list[int] = []
    for r in roots:
        root = states[r]
        if not root.active:
            continue
        mem = members[r]
        adj = {v: states[v].nbrs for v in mem}
        rotation = embed(adj)
        depth = max(states[v].level for v in mem)  # type: ignore[type-var]
        credits[r] = embedding_credits(depth, len(mem), config.gh_cost_constant)
        if rotation is None:
            if not config.forced_embedding:
                engine.record_output(r, Reject(EMBEDDING_FAILED, {"n": root.n_j, "m": root.m_j}))
                for v in mem:
                    states[v].active = False
                continue
            rotation = RotationSystem({v: tuple(adj[v]) for v in mem})
        for v in mem:
            st = states[v]
            st.order = list(rotation.order[v])
            if st.order:
                first = st.order[0] if st.parent is None else st.parent
                st.edge_label = local_edge_labels(st.order, first)
        live.append(r)
    if credits:
        engine.charge_modeled(max(credits.values()))

    live_set = set(live)
    engine.execute(DistributeLabels(), states, start=live)
    active_nodes = [v for v in g.nodes() if part_of[v] in live_set]
    engine.execute(ExchangeLabels(), states, start=active_nodes)

    s = sample_size(g.n, config.epsilon, config.sample_constant)
    cap = config.overflow_factor * s
    sample_roots = [r for r in live if states[r].mt_j > 0]
    sample_nodes = [v for v in active_nodes if states[part_of[v]].mt_j > 0]
    engine.execute(SampleNontree(s), states, start=sample_nodes)
    overflowed = [r for r in sample_roots if len(states[r].sample) > cap]
    if overflowed:
        for r in overflowed:
            engine.note(f"SampleOverflow at part {r}: {len(states[r].sample)} > {cap}; resampling")
        retry_set = set(overflowed)
        engine.execute(SampleNontree(s), states, start=[v for v in sample_nodes if part_of[v] in retry_set])
        for r in overflowed:
            if len(states[r].sample) > cap:
                engine.note(f"SampleOverflow again at part {r}; keeping the first {cap} descriptors")
                states[r].sample = states[r].sample[:cap]
    samples = {r: list(states[r].sample) for r in sample_roots}

    recorder: list | None = [] if config.record_checks else None
    engine.execute(
        BroadcastAndCheck({r: d for r, d in samples.items() if d}, recorder),
        states,
        start=[r for r, d in samples.items() if d],
    )
    return Stage2Result(states, samples, overflowed, recorder, s, credits)


def accept_remaining(g: Graph, engine: Engine) -> None:
    """Every node that did not reject outputs accept once its last program is quiet."""
    for v in g.nodes():
        if v not in engine.trace.verdicts:
            engine.record_output(v, ACCEPT)


def run_tester(g: Graph, config: TesterConfig, seed: int = 0) -> TesterRun:
    """Partition, then per-part checks; returns verdict, trace and stage details."""
    engine = Engine(g, budget_bits=config.budget_bits, max_rounds=config.max_rounds, seed=seed)
    stage1 = stage2 = None
    truncated = False
    try:
        stage1, _ = run_stage1(
            g, config.epsilon, seed=seed, alpha=config.alpha, engine=engine, instrument=config.instrument
        )
        if not stage1.rejected:
            stage2 = run_stage2(g, stage1.state.part_of, engine, config)
    except RoundLimitExceeded as exc:
        truncated = True
        engine.round = exc.limit
        engine.trace.rounds_used = exc.limit
        engine.note(f"round limit {exc.limit} reached; undecided nodes accept")
    accept_remaining(g, engine)
    return TesterRun(Verdict.from_trace(engine.trace), engine.trace, stage1, stage2, truncated)


def run_full_tester(
    g: Graph, epsilon: float, seed: int = 0, config: TesterConfig | None = None
) -> tuple[Verdict, Trace]:
    cfg = config if config is not None else TesterConfig(epsilon=epsilon)
    if cfg.epsilon != epsilon:
        cfg = TesterConfig(**{**cfg.__dict__, "epsilon": epsilon})
    result = run_tester(g, cfg, seed)
    return result.verdict, result.trace


# ---------------------------------------------------------------------------
# centralized counterpart of the sampler
# ---------------------------------------------------------------------------


def sample_nontree_edges(
    tree: BfsTree,
    labeling: Labeling,
    epsilon: float,
    seed: int,
    n: int | None = None,
    c_s: float = 4.0,
) -> list[CycleDescriptor]:
    """Same coins as the distributed sampler when sampling is each node's first random draw."""
    s = sample_size(tree.n if n is None else n, epsilon, c_s)
    bias = sample_bias(s, tree.m_tilde)
    out = []
    by_owner: dict[int, list[int]] = {}
    for u, v in tree.nontree_edges():
        o = tree.owner(u, v)
        by_owner.setdefault(o, []).append(v if o == u else u)
    for x in sorted(by_owner):
        rng = random.Random(node_seed(seed, x))
        for w in sorted(by_owner[x]):
            if bias >= 1.0 or rng.random() < bias:
                a = EndpointInfo(labeling.node_label[x], labeling.edge_label[x][w], labeling.degree[x])
                b = EndpointInfo(labeling.node_label[w], labeling.edge_label[w][x], labeling.degree[w])
                out.append(make_descriptor(a, b))
    return out


__all__ = [
    "ARBORICITY_EXCEEDED",
    "EMBEDDING_FAILED",
    "EULER_BOUND",
    "S2",
    "VIOLATING_EDGE",
    "Stage2Result",
    "TesterConfig",
    "TesterRun",
    "Verdict",
    "embedding_credits",
    "run_full_tester",
    "run_stage2",
    "run_tester",
    "sample_bias",
    "sample_nontree_edges",
    "sample_size",
]
