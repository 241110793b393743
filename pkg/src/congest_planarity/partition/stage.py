"""Iterated contraction into connected low-diameter parts.

Each phase works on the contracted graph whose vertices are the current
parts and whose edge weights count the graph edges between two parts:

1. orient the contracted graph with few out-edges per part (peeling), or, in
   the randomized variant, sample heavy edges by uniform edge draws;
2. every part selects one heavy out-edge, realized by a designated graph edge;
3. the selected pseudo-forest is 3-colored with Cole-Vishkin reduction;
4. a color-based rule marks a forest of shallow trees;
5. the heavier of the even-level and odd-level edge classes is contracted.

All steps run as node programs on the engine; the part roots make every
decision from data delivered to them by convergecasts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

from ..engine import Engine, NodeContext, Reject, Step
from ..graph.core import Graph
from .emulation import AuxRunner, Mem

# message tags
ACT, LIS, SEL, DES, IN, CNT, COL, PC = 1, 2, 3, 4, 5, 6, 7, 8
MK1, MC, MK2, MO, MI, LV, LVX, LISTEN = 9, 10, 11, 12, 13, 14, 15, 16
SU, SUX, BT, BTX, NR, FL, AD, PART = 17, 18, 19, 20, 21, 22, 23, 24
DRAW, TGT = 25, 26
SATURATED = (-1, 0)

ARBORICITY_EXCEEDED = "ArboricityExceeded"

Mode = Literal["deterministic", "randomized"]


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def phase_count(epsilon: float, alpha: int, factor_den: int = 12) -> int:
    """Smallest t with (1 - 1/(factor_den * alpha))^t <= epsilon / 2."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    q = 1.0 - 1.0 / (factor_den * alpha)
    target = epsilon / 2.0
    t = max(0, math.ceil(math.log(1.0 / target) / -math.log(q)))
    while q**t > target:
        t += 1
    while t > 0 and q ** (t - 1) <= target:
        t -= 1
    return t


def fd_rounds(n: int) -> int:
    """Super-rounds of the peeling decomposition: ceil(log_{3/2} n) + 1."""
    return math.ceil(math.log(max(n, 1)) / math.log(1.5)) + 1


def cv_iterations(n: int) -> int:
    """Cole-Vishkin reductions needed to go from ids below ``n`` to at most 6 colors."""
    k, it = max(n, 1), 0
    while k > 6:
        k = 2 * max(1, (k - 1).bit_length())
        it += 1
    return it


def cv_reduce(c: int, parent_color: int | None) -> int:
    if parent_color is None:
        return c & 1
    diff = c ^ parent_color
    i = (diff & -diff).bit_length() - 1
    return 2 * i + ((c >> i) & 1)


MARK_NONE, MARK_ALL_IN, MARK_IN_FROM_3 = 0, 1, 2


def mark_decision(
    color: int, parent_color: int | None, w_out: int | None, w_in: int, w_in_from3: int
) -> tuple[bool, int]:
    """Marking rule of one part, colors being 0, 1, 2.

    Color 0 keeps its out-edge if it weighs at least all in-edges together,
    otherwise all in-edges. Color 1 keeps its out-edge when it points to color
    2 and outweighs the in-edges from color 2, otherwise those in-edges. Color
    2 marks nothing itself. Returns ``(mark_out, in_mode)``.
    """
    if color == 0:
        if w_out is not None and w_out >= w_in:
            return True, MARK_NONE
        return False, MARK_ALL_IN
    if color == 1:
        if w_out is not None and parent_color == 2 and w_out >= w_in_from3:
            return True, MARK_NONE
        return False, MARK_IN_FROM_3
    return False, MARK_NONE


def three_color(parent: dict[int, int | None], n: int | None = None) -> dict[int, int]:
    """Centralized replay of the distributed coloring of a graph with out-degree at most one."""
    color = {x: x for x in parent}
    n = (max(parent) + 1 if parent else 1) if n is None else n
    for _ in range(cv_iterations(n)):
        color = {x: cv_reduce(color[x], None if p is None else color[p]) for x, p in parent.items()}
    for c in (5, 4, 3):
        old = color
        color = {
            x: old[p] if p is not None else min(y for y in (0, 1, 2) if y != old[x]) for x, p in parent.items()
        }
        shifted = color
        color = {}
        for x, p in parent.items():
            cur = shifted[x]
            if cur == c:
                forbidden = {old[x]}
                if p is not None:
                    forbidden.add(shifted[p])
                cur = min(y for y in (0, 1, 2) if y not in forbidden)
            color[x] = cur
    return color


def marked_edges(
    parent: dict[int, int | None], weight: dict[int, int], color: dict[int, int]
) -> set[tuple[int, int]]:
    """Centralized marking; ``weight[x]`` is the weight of the edge from ``x`` to ``parent[x]``."""
    w_in: dict[int, int] = {x: 0 for x in parent}
    w_in3: dict[int, int] = {x: 0 for x in parent}
    for x, p in parent.items():
        if p is not None:
            w_in[p] += weight[x]
            if color[x] == 2:
                w_in3[p] += weight[x]
    marked: set[tuple[int, int]] = set()
    for x, p in parent.items():
        pc = None if p is None else color[p]
        w_out = None if p is None else weight[x]
        mark_out, mode = mark_decision(color[x], pc, w_out, w_in[x], w_in3[x])
        if mark_out:
            marked.add((x, p))  # type: ignore[arg-type]
        if mode:
            for y, q in parent.items():
                if q == x and (mode == MARK_ALL_IN or color[y] == 2):
                    marked.add((y, x))
    return marked


@dataclass(frozen=True)
class PhaseConfig:
    epsilon: float
    alpha: int
    t: int
    s_fd: int

    @classmethod
    def build(cls, epsilon: float, alpha: int, n: int) -> PhaseConfig:
        return cls(epsilon, alpha, phase_count(epsilon, alpha), fd_rounds(n))


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass
class PartitionState:
    part_of: dict[int, int]
    parent: dict[int, int | None]
    children: dict[int, list[int]]
    phase: int

    @property
    def roots(self) -> list[int]:
        return sorted(v for v, p in self.parent.items() if p is None)

    def parts(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v in sorted(self.part_of):
            out.setdefault(self.part_of[v], []).append(v)
        return out

    def tree_edges(self) -> list[tuple[int, int]]:
        return sorted((min(v, p), max(v, p)) for v, p in self.parent.items() if p is not None)

    def cut_edges(self, g: Graph) -> list[tuple[int, int]]:
        return sorted(e for e in g.edges if self.part_of[e[0]] != self.part_of[e[1]])

    @classmethod
    def from_memory(cls, mem: dict[int, Mem], phase: int) -> PartitionState:
        return cls(
            {v: st.part for v, st in mem.items()},
            {v: st.parent for v, st in mem.items()},
            {v: sorted(st.children) for v, st in mem.items()},
            phase,
        )

    @classmethod
    def singletons(cls, n: int) -> PartitionState:
        return cls({v: v for v in range(n)}, {v: None for v in range(n)}, {v: [] for v in range(n)}, 0)


@dataclass
class AuxWeightedGraph:
    """Contracted graph: parts as vertices, crossing-edge counts as weights."""

    weights: dict[tuple[int, int], int]

    @classmethod
    def from_partition(cls, g: Graph, part_of: dict[int, int]) -> AuxWeightedGraph:
        w: dict[tuple[int, int], int] = {}
        for u, v in g.edges:
            a, b = part_of[u], part_of[v]
            if a != b:
                key = (min(a, b), max(a, b))
                w[key] = w.get(key, 0) + 1
        return cls(w)

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())

    def neighbors(self, part: int) -> dict[int, int]:
        out = {}
        for (a, b), w in self.weights.items():
            if a == part:
                out[b] = w
            elif b == part:
                out[a] = w
        return out


@dataclass
class PhaseStats:
    phase: int
    w_before: int
    w_after: int
    parts_after: int
    selected_weight: int = 0
    marked_weight: int = 0
    contracted_weight: int = 0
    max_diameter: int | None = None
    diameters_ok: bool | None = None
    trees_ok: bool | None = None
    fd_super_rounds: int = 0
    rounds_after: int = 0
    aux_faithful: bool | None = None

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "w_before": self.w_before,
            "w_after": self.w_after,
            "max_diameter": self.max_diameter,
            "selected_weight": self.selected_weight,
            "marked_weight": self.marked_weight,
            "contracted_weight": self.contracted_weight,
            "parts": self.parts_after,
        }


@dataclass
class Stage1Result:
    state: PartitionState
    aux: AuxWeightedGraph
    rejected: bool
    rejecting_roots: list[int]
    phase_stats: list[PhaseStats]
    phases_run: int
    config: PhaseConfig
    rounds: int
    mem: dict[int, Mem] = field(repr=False, default_factory=dict)

    @property
    def cut_weight(self) -> int:
        return self.aux.total_weight

    def dump(self, g: Graph) -> dict:
        parts = []
        tree = self.state.tree_edges()
        for root, members in sorted(self.state.parts().items()):
            mset = set(members)
            parts.append(
                {
                    "root": root,
                    "members": members,
                    "tree_edges": [list(e) for e in tree if e[0] in mset],
                }
            )
        return {
            "parts": parts,
            "cut_edges": len(self.state.cut_edges(g)),
            "phase_stats": [s.to_dict() for s in self.phase_stats],
        }


# ---------------------------------------------------------------------------
# tree maintenance programs
# ---------------------------------------------------------------------------


class FlipProgram:
    """Re-hangs an absorbed part's tree below the absorbing part's endpoint.

    The designated node adopts its neighbor across the selected edge as new
    parent; every edge on its old root path reverses direction.
    """

    def __init__(self, starters: set[int]) -> None:
        self.starters = starters

    def step(self, ctx: NodeContext, st: Mem, inbox: dict) -> Step:
        send = []
        if ctx.node in self.starters:
            self.starters.discard(ctx.node)
            old = st.parent
            st.parent = st.des_v
            if old is not None:
                st.children.append(old)
                send.append((old, (FL,)))
            send.append((st.des_v, (AD,)))
        for sender, msg in inbox.items():
            if msg[0] == FL:
                st.children.remove(sender)
                old = st.parent
                st.parent = sender
                if old is not None:
                    st.children.append(old)
                    send.append((old, (FL,)))
            elif msg[0] == AD:
                st.children.append(sender)
        return Step(st, send)


class PartAnnounce:
    """Nodes whose part id changed tell all their neighbors."""

    def __init__(self, changed: set[int]) -> None:
        self.changed = changed

    def step(self, ctx: NodeContext, st: Mem, inbox: dict) -> Step:
        for sender, msg in inbox.items():
            st.nbr_part[sender] = msg[1]
        if ctx.node in self.changed:
            self.changed.discard(ctx.node)
            msg = (PART, st.part)
            return Step(st, [(w, msg) for w in ctx.neighbors])
        return Step(st)


# ---------------------------------------------------------------------------
# the phase driver
# ---------------------------------------------------------------------------


class Partitioner:
    """Runs partition phases over an engine; shared by both selection variants."""

    def __init__(
        self,
        g: Graph,
        engine: Engine,
        alpha: int = 3,
        mode: Mode = "deterministic",
        s_trials: int = 1,
        instrument: bool = False,
    ) -> None:
        self.g = g
        self.engine = engine
        self.alpha = alpha
        self.mode = mode
        self.s_trials = max(1, s_trials)
        self.instrument = instrument
        self.mem = {v: Mem(v, g.neighbors(v)) for v in g.nodes()}
        self.runner = AuxRunner(engine, self.mem)
        self.s_fd = fd_rounds(g.n)
        self.cv_iters = cv_iterations(g.n)
        self.stats: list[PhaseStats] = []
        self.rejecting: list[int] = []

    # -- helpers ----------------------------------------------------------------

    def roots(self) -> list[Mem]:
        return [st for st in self.mem.values() if st.parent is None]

    def cut_weight(self) -> int:
        return sum(1 for u, v in self.g.edges if self.mem[u].part != self.mem[v].part)

    def active_roots(self) -> list[Mem]:
        return [st for st in self.roots() if not st.r_isolated]

    # -- main loop --------------------------------------------------------------

    def run(self, phases: int) -> tuple[bool, int]:
        """Run up to ``phases`` phases; returns (rejected, phases executed)."""
        done = 0
        for i in range(1, phases + 1):
            if not self.active_roots():
                break
            outcome = self.phase(i)
            done = i
            if outcome == "reject":
                return True, done
        return False, done

    def phase(self, i: int) -> str:
        for st in self.mem.values():
            st.reset_phase()
            st.relevant = False
            st.rel_children = []
        for st in self.roots():
            st.r_status = "done" if st.r_isolated else "active"
            st.r_fd_nbrs = {}
            st.r_out = {}
            st.r_sel = None
            st.r_sr1 = None
            st.r_inF = False
            st.r_inT = False
        w_before = self.cut_weight() if self.instrument else 0
        stats = PhaseStats(i, w_before, w_before, 0)

        if self.mode == "deterministic":
            srs = self.forest_decomposition()
            stats.fd_super_rounds = srs
            if self.rejecting:
                self.runner.announce({r: Reject(ARBORICITY_EXCEEDED, {"phase": i}) for r in self.rejecting})
                self.stats.append(stats)
                return "reject"
            for st in self.roots():
                if st.r_out:
                    target, w = max(st.r_out.items(), key=lambda kv: (kv[1], -kv[0]))
                    st.r_sel = (target, w)
        else:
            self.weighted_selection()

        if self.instrument and self.mode == "deterministic":
            stats.aux_faithful = self._check_faithful()

        if not any(st.r_sel for st in self.roots()):
            self._finish_stats(stats, i)
            return "idle"
        self.designate()
        if self.instrument:
            stats.selected_weight = sum(st.r_sel[1] for st in self.roots() if st.r_sel)
        self.color()
        self.mark()
        self.tree_levels()
        self.subtree_sums()
        self.spread_decision()
        if self.instrument:
            stats.marked_weight = sum(st.r_sel[1] for st in self.roots() if st.r_sel and st.r_t_out)
        stats.contracted_weight = self.contract()
        self._finish_stats(stats, i)
        return "ok"

    def _finish_stats(self, stats: PhaseStats, i: int) -> None:
        stats.rounds_after = self.engine.round
        stats.parts_after = len(self.roots())
        if self.instrument:
            stats.w_after = self.cut_weight()
            from ..oracle.metrics import verify_partition

            part_of = {v: st.part for v, st in self.mem.items()}
            parent = {v: st.parent for v, st in self.mem.items()}
            report = verify_partition(self.g, part_of, parent)
            stats.max_diameter = report.max_diameter
            stats.trees_ok = report.all_trees_valid and report.all_connected
            stats.diameters_ok = report.all_connected and report.max_diameter <= 4**i
        self.stats.append(stats)

    def _check_faithful(self) -> bool:
        part_of = {v: st.part for v, st in self.mem.items()}
        aux = AuxWeightedGraph.from_partition(self.g, part_of)
        for st in self.roots():
            if st.r_sr1 is None:
                continue
            if st.r_sr1 != aux.neighbors(st.id):
                return False
        return True

    # -- step 1: peeling orientation --------------------------------------------

    def forest_decomposition(self) -> int:
        limit = 3 * self.alpha
        runner = self.runner
        sr_box = [0]

        def payload(st: Mem):
            if st.r_status == "active":
                return (ACT, st.id)
            if st.r_status == "listen":
                return (LIS,)
            return None

        def on_bcast(ctx, st: Mem, pl):
            if pl[0] == ACT:
                return [(w, pl) for w in st.ext_neighbors()]
            return None

        def on_cross(ctx, st: Mem, sender, msg):
            if msg[0] != ACT:
                return
            if st.fd_sr != sr_box[0]:
                st.fd_sr = sr_box[0]
                st.fd_recv = {}
            st.fd_recv[msg[1]] = st.fd_recv.get(msg[1], 0) + 1

        def combine(ctx, st: Mem, recs):
            acc: dict[int, int] = dict(st.fd_recv) if st.fd_sr == sr_box[0] else {}
            for rec in recs:
                if rec == SATURATED:
                    return [SATURATED]
                acc[rec[0]] = acc.get(rec[0], 0) + rec[1]
            if len(acc) > limit:
                return [SATURATED]
            return sorted(acc.items())

        def at_root(ctx, st: Mem, out):
            sr = sr_box[0]
            saturated = bool(out) and out[0] == SATURATED
            if st.r_status == "active":
                if sr == 1 and not saturated:
                    st.r_sr1 = dict(out)
                if saturated:
                    return
                if sr == 1 and not out:
                    st.r_isolated = True
                    st.r_status = "done"
                    return
                st.r_status = "listen"
                st.r_fd_nbrs = dict(out)
            elif st.r_status == "listen":
                still = None if saturated else {r for r, _ in out}
                st.r_out = {r: x for r, x in st.r_fd_nbrs.items() if still is None or r in still or st.id < r}
                st.r_status = "done"

        used = 0
        for sr in range(1, self.s_fd + 1):
            sr_box[0] = sr
            if runner.aux_round(payload, on_bcast, on_cross, combine, at_root) == 0:
                break
            used = sr
        for st in self.roots():
            if st.r_status == "active":
                self.rejecting.append(st.id)
            elif st.r_status == "listen":
                st.r_out = {r: x for r, x in st.r_fd_nbrs.items() if st.id < r}
                st.r_status = "done"
        self.rejecting.sort()
        return used

    # -- step 1 (randomized): weighted edge selection -----------------------------

    def load_state(self, state: PartitionState) -> None:
        """Start from an existing partition instead of singletons."""
        for v, st in self.mem.items():
            st.part = state.part_of[v]
            st.parent = state.parent[v]
            st.children = list(state.children[v])
            st.nbr_part = {w: state.part_of[w] for w in st.nbr_part}

    def uniform_draws(self, trials: int) -> dict[int, list[tuple[int, int]]]:
        """Per part, ``trials`` independent uniform draws among the edges leaving it."""
        saved = self.s_trials
        self.s_trials = trials
        for st in self.roots():
            st.r_draw_edges = []
        try:
            self.weighted_selection(draw_only=True)
        finally:
            self.s_trials = saved
        return {st.id: list(st.r_draw_edges) for st in self.roots()}

    def weighted_selection(self, draw_only: bool = False) -> None:
        trials = self.s_trials

        def payload_draw(st: Mem):
            return (DRAW, trials)

        def combine_draw(ctx, st: Mem, recs):
            rng = ctx.rng
            ext = st.ext_neighbors()
            buckets: dict[int, list[tuple]] = {}
            for rec in recs:
                buckets.setdefault(rec[0], []).append(rec)
            out = []
            for j in range(trials):
                items = list(buckets.get(j, ()))
                if ext:
                    w = ext[rng.randrange(len(ext))]
                    items.append((j, len(ext), st.id, w, st.nbr_part[w]))
                total = sum(it[1] for it in items)
                if not total:
                    continue
                x = rng.randrange(total)
                for it in items:
                    if x < it[1]:
                        out.append((j, total, it[2], it[3], it[4]))
                        break
                    x -= it[1]
            return out

        def at_root_draw(ctx, st: Mem, out):
            st.r_draw_edges = [(rec[2], rec[3]) for rec in out]
            st.r_draws = sorted({rec[4] for rec in out})
            if not out:
                st.r_isolated = True

        self.runner.aux_round(payload_draw, None, None, combine_draw, at_root_draw)
        if draw_only:
            return

        def payload_tgt(st: Mem):
            return (TGT, tuple(st.r_draws)) if getattr(st, "r_draws", None) else None

        def combine_tgt(ctx, st: Mem, recs):
            targets = st.bc[1]
            acc = dict.fromkeys(targets, 0)
            for q in st.nbr_part.values():
                if q in acc:
                    acc[q] += 1
            for q, c in recs:
                acc[q] += c
            return sorted(acc.items())

        def at_root_tgt(ctx, st: Mem, out):
            weights = dict(out)
            st.r_weights = weights
            target, w = max(weights.items(), key=lambda kv: (kv[1], -kv[0]))
            st.r_sel = (target, w)

        self.runner.aux_round(payload_tgt, None, None, combine_tgt, at_root_tgt)
        for st in self.roots():
            st.r_draws = None

    # -- step 2: designated edges -------------------------------------------------

    def designate(self) -> None:
        def payload_sel(st: Mem):
            return (SEL, st.r_sel[0]) if st.r_sel else None

        def on_sel(ctx, st: Mem, pl):
            st.sel_target = pl[1]

        def combine_min(ctx, st: Mem, recs):
            best = None
            if any(q == st.sel_target for q in st.nbr_part.values()):
                best = st.id
            for (c,) in recs:
                if best is None or c < best:
                    best = c
            return [] if best is None else [(best,)]

        def at_root_min(ctx, st: Mem, out):
            st.r_des = out[0][0]

        self.runner.aux_round(payload_sel, on_sel, None, combine_min, at_root_min)

        def payload_des(st: Mem):
            return (DES, st.r_des, st.r_sel[1]) if st.r_sel else None

        def on_des(ctx, st: Mem, pl):
            if st.id != pl[1]:
                return None
            st.is_des = True
            target = st.sel_target
            st.des_v = min(w for w, q in st.nbr_part.items() if q == target)
            return [(st.des_v, (IN, st.part, pl[2]))]

        def on_in(ctx, st: Mem, sender, msg):
            if msg[0] != IN:
                return
            child_part, w = msg[1], msg[2]
            if st.sel_target == child_part:
                # both parts picked each other: the edge leaves the smaller id
                if st.part > child_part:
                    st.drop = True
                    st.in_edges[sender] = [child_part, w, None]
                return
            st.in_edges[sender] = [child_part, w, None]

        self.runner.aux_round(payload_des, on_des, on_in)

        def payload_cnt(st: Mem):
            return (CNT,)

        def combine_cnt(ctx, st: Mem, recs):
            n_in = len(st.in_edges)
            drop = st.drop
            rel_children = []
            for child, c_in, c_drop, c_rel in recs:
                n_in += c_in
                drop = drop or bool(c_drop)
                if c_rel:
                    rel_children.append(child)
            st.rel_children = rel_children
            st.relevant = bool(rel_children) or st.is_des or bool(st.in_edges)
            return [(st.id, n_in, int(drop), int(st.relevant))]

        def at_root_cnt(ctx, st: Mem, out):
            _, n_in, drop, _ = out[0]
            if drop:
                st.r_sel = None
            st.r_n_in = n_in
            st.r_inF = st.r_sel is not None or n_in > 0

        self.runner.aux_round(payload_cnt, None, None, combine_cnt, at_root_cnt)

    # -- step 3: three-coloring of the selected pseudo-forest ----------------------

    def _color_round(self, at_root) -> None:
        def payload(st: Mem):
            return (COL, st.r_color, int(st.r_sel is not None)) if st.r_inF else None

        def on_bcast(ctx, st: Mem, pl):
            if not st.in_edges:
                return None
            msg = (PC, pl[1])
            return [(u, msg) for u in st.in_edges]

        def on_cross(ctx, st: Mem, sender, msg):
            if msg[0] == PC:
                st.pcolor = msg[1]

        def combine(ctx, st: Mem, recs):
            if recs:
                return [recs[0]]
            if st.is_des and st.bc[2] and st.pcolor is not None:
                return [(st.pcolor,)]
            return []

        def root_hook(ctx, st: Mem, out):
            parent_color = out[0][0] if (out and st.r_sel is not None) else None
            at_root(st, parent_color)

        self.runner.aux_round(payload, on_bcast, on_cross, combine, root_hook, pruned=True)
        for st in self.mem.values():
            st.pcolor = None

    def color(self) -> None:
        for st in self.roots():
            if getattr(st, "r_inF", False):
                st.r_color = st.id
            else:
                st.r_inF = False

        def reduce(st: Mem, pc):
            st.r_color = cv_reduce(st.r_color, pc)

        for _ in range(self.cv_iters):
            self._color_round(reduce)

        for c in (5, 4, 3):

            def shift(st: Mem, pc):
                st.r_old = st.r_color
                if st.r_sel is not None:
                    st.r_color = pc
                else:
                    st.r_color = min(x for x in (0, 1, 2) if x != st.r_color)

            def recolor(st: Mem, pc, c=c):
                if st.r_color == c:
                    forbidden = {st.r_old}
                    if st.r_sel is not None:
                        forbidden.add(pc)
                    st.r_color = min(x for x in (0, 1, 2) if x not in forbidden)

            self._color_round(shift)
            self._color_round(recolor)

        def final(st: Mem, pc):
            st.r_pcolor = pc

        self._color_round(final)

    # -- step 4: marking --------------------------------------------------------------

    def mark(self) -> None:
        def payload1(st: Mem):
            if not st.r_inF:
                return None
            w_out = st.r_sel[1] if st.r_sel else 0
            return (MK1, st.r_color, int(st.r_sel is not None), w_out)

        def on_b1(ctx, st: Mem, pl):
            if st.is_des and pl[2]:
                return [(st.des_v, (MC, pl[1], pl[3]))]
            return None

        def on_c1(ctx, st: Mem, sender, msg):
            if msg[0] == MC and sender in st.in_edges:
                st.in_edges[sender][2] = msg[1]

        def combine1(ctx, st: Mem, recs):
            total = sum(e[1] for e in st.in_edges.values())
            from3 = sum(e[1] for e in st.in_edges.values() if e[2] == 2)
            for a, b in recs:
                total += a
                from3 += b
            return [(total, from3)]

        def at_root1(ctx, st: Mem, out):
            total, from3 = out[0]
            w_out = st.r_sel[1] if st.r_sel else None
            st.r_mark_out, st.r_mark_mode = mark_decision(st.r_color, st.r_pcolor, w_out, total, from3)

        self.runner.aux_round(payload1, on_b1, on_c1, combine1, at_root1, pruned=True)

        def payload2(st: Mem):
            if not st.r_inF:
                return None
            return (MK2, int(st.r_mark_out), st.r_mark_mode, int(st.r_sel is not None))

        def on_b2(ctx, st: Mem, pl):
            send = []
            if st.is_des and pl[3] and pl[1]:
                send.append((st.des_v, (MO,)))
            mode = pl[2]
            for u, entry in st.in_edges.items():
                if mode == 1 or (mode == 2 and entry[2] == 2):
                    st.t_in.add(u)
                    send.append((u, (MI,)))
            return send

        def on_c2(ctx, st: Mem, sender, msg):
            if msg[0] == MO and sender in st.in_edges:
                st.t_in.add(sender)
            elif msg[0] == MI:
                st.t_out_marked = True

        def combine2(ctx, st: Mem, recs):
            out_m = int(st.t_out_marked and st.is_des and st.bc[3])
            n_ch = len(st.t_in)
            for a, b in recs:
                out_m += a
                n_ch += b
            return [(out_m, n_ch)]

        def at_root2(ctx, st: Mem, out):
            out_m, n_ch = out[0]
            st.r_t_out = st.r_sel is not None and (st.r_mark_out or out_m > 0)
            st.r_t_nch = n_ch

        for st in self.roots():
            st.r_t_out = False
            st.r_t_nch = 0
        self.runner.aux_round(payload2, on_b2, on_c2, combine2, at_root2, pruned=True)
        for st in self.roots():
            st.r_inT = st.r_t_out or st.r_t_nch > 0
            st.r_level = 0 if (st.r_inT and not st.r_t_out) else None
            st.r_sent = False

    # -- step 5: levels, sums, decision, contraction -----------------------------------

    def _downward_waves(self, value_attr: str, tag: int, xtag: int, attr_in: str, bump: int) -> None:
        """Push a root value down the marked trees, one tree level per aux-round."""
        for st in self.roots():
            st.r_sent = False

        def payload(st: Mem):
            if not getattr(st, "r_inT", False):
                return None
            val = getattr(st, value_attr)
            if val is not None:
                if st.r_sent or not st.r_t_nch:
                    return None
                st.r_sent = True
                return (tag, val)
            return (LISTEN,)

        def on_bcast(ctx, st: Mem, pl):
            if pl[0] != tag or not st.t_in:
                return None
            msg = (xtag, pl[1] + bump)
            return [(u, msg) for u in st.t_in]

        def on_cross(ctx, st: Mem, sender, msg):
            if msg[0] == xtag:
                setattr(st, attr_in, msg[1])

        def combine(ctx, st: Mem, recs):
            if recs:
                return [recs[0]]
            val = getattr(st, attr_in)
            return [(val,)] if val is not None else []

        def at_root(ctx, st: Mem, out):
            if out and getattr(st, value_attr) is None:
                setattr(st, value_attr, out[0][0])

        for _ in range(16):
            pending = [st for st in self.roots() if getattr(st, "r_inT", False) and getattr(st, value_attr) is None]
            if not pending:
                break
            self.runner.aux_round(payload, on_bcast, on_cross, combine, at_root, pruned=True)
        else:
            raise AssertionError("marked structure is not a forest of shallow trees")

    def tree_levels(self) -> None:
        self._downward_waves("r_level", LV, LVX, "level_in", 1)

    def subtree_sums(self) -> None:
        for st in self.roots():
            st.r_sum = [0, 0]
            st.r_recv = 0
            st.r_sum_sent = False

        def payload(st: Mem):
            if not getattr(st, "r_inT", False):
                return None
            if st.r_recv == st.r_t_nch:
                if st.r_t_out and not st.r_sum_sent:
                    st.r_sum_sent = True
                    w = st.r_sel[1]
                    s0, s1 = st.r_sum
                    if st.r_level % 2 == 0:
                        s0 += w
                    else:
                        s1 += w
                    return (SU, s0, s1)
                return None
            return (LISTEN,)

        def on_bcast(ctx, st: Mem, pl):
            if pl[0] == SU and st.is_des:
                return [(st.des_v, (SUX, pl[1], pl[2]))]
            return None

        def on_cross(ctx, st: Mem, sender, msg):
            if msg[0] == SUX and sender in st.t_in:
                st.sum_in.append((msg[1], msg[2]))

        def combine(ctx, st: Mem, recs):
            a = b = c = 0
            for x, y, k in recs:
                a += x
                b += y
                c += k
            for x, y in st.sum_in:
                a += x
                b += y
                c += 1
            st.sum_in = []
            return [(a, b, c)] if c else []

        def at_root(ctx, st: Mem, out):
            if out:
                a, b, c = out[0]
                st.r_sum[0] += a
                st.r_sum[1] += b
                st.r_recv += c

        for _ in range(32):
            waiting = [
                st
                for st in self.roots()
                if getattr(st, "r_inT", False) and (st.r_recv < st.r_t_nch or (st.r_t_out and not st.r_sum_sent))
            ]
            if not waiting:
                break
            self.runner.aux_round(payload, on_bcast, on_cross, combine, at_root, pruned=True)
        else:
            raise AssertionError("subtree sums did not converge")
        for st in self.roots():
            st.r_bit = None
            if getattr(st, "r_inT", False) and not st.r_t_out:
                st.r_bit = 0 if st.r_sum[0] >= st.r_sum[1] else 1

    def spread_decision(self) -> None:
        self._downward_waves("r_bit", BT, BTX, "bit_in", 0)

    def contract(self) -> int:
        """Contract the chosen edge class; returns the contracted weight."""
        contracting: dict[int, int] = {}
        weight = 0
        for st in self.roots():
            if not getattr(st, "r_inT", False) or not st.r_t_out:
                continue
            even = st.r_level % 2 == 0
            if (even and st.r_bit == 0) or (not even and st.r_bit == 1):
                contracting[st.id] = st.r_sel[0]
                weight += st.r_sel[1]
        if not contracting:
            return 0
        starters: set[int] = set()
        changed: set[int] = set()

        def payload(st: Mem):
            target = contracting.get(st.id)
            return (NR, target) if target is not None else None

        def on_bcast(ctx, st: Mem, pl):
            st.part = pl[1]
            changed.add(st.id)
            if st.is_des:
                starters.add(st.id)

        self.runner.aux_round(payload, on_bcast)
        self.engine.execute(FlipProgram(set(starters)), self.mem, start=sorted(starters))
        self.engine.execute(PartAnnounce(set(changed)), self.mem, start=sorted(changed))
        return weight


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def run_stage1(
    g: Graph,
    epsilon: float,
    seed: int = 0,
    alpha: int = 3,
    engine: Engine | None = None,
    instrument: bool = False,
    phases: int | None = None,
) -> tuple[Stage1Result, Engine]:
    """Deterministic partition stage; ``seed`` only seeds the engine's node streams."""
    eng = engine if engine is not None else Engine(g, seed=seed)
    cfg = PhaseConfig.build(epsilon, alpha, g.n)
    part = Partitioner(g, eng, alpha=alpha, mode="deterministic", instrument=instrument)
    rejected, done = part.run(cfg.t if phases is None else phases)
    return _result(g, part, cfg, rejected, done), eng


def _result(g: Graph, part: Partitioner, cfg: PhaseConfig, rejected: bool, done: int) -> Stage1Result:
    state = PartitionState.from_memory(part.mem, done)
    aux = AuxWeightedGraph.from_partition(g, state.part_of)
    return Stage1Result(
        state=state,
        aux=aux,
        rejected=rejected,
        rejecting_roots=list(part.rejecting),
        phase_stats=part.stats,
        phases_run=done,
        config=cfg,
        rounds=part.engine.round,
        mem=part.mem,
    )
