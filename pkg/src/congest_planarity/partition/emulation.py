"""Part-level communication built from node programs.

Every part is a connected set of nodes spanned by a rooted tree. An
*aux-round* lets parts act like single nodes of the contracted graph: each
root broadcasts a payload down its tree, nodes react by messaging neighbors
in other parts, and a convergecast carries what arrived back to the root.
Each of the three pieces is one engine execution, so everything sent is
metered by the engine.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from typing import Any

from ..engine import Engine, NodeContext, Reject, Step

Record = tuple


class Mem:
    """Local memory of one node during partitioning.

    Fields prefixed ``r_`` are only meaningful while the node is a root.
    """

    def __init__(self, node: int, neighbors: Iterable[int]) -> None:
        self.id = node
        self.part = node
        self.parent: int | None = None
        self.children: list[int] = []
        self.nbr_part: dict[int, int] = {w: w for w in neighbors}
        # pruned-tree bookkeeping
        self.rel_children: list[int] = []
        self.relevant = False
        # aux-round scratch
        self.token = -1
        self.cc_wait = 0
        self.cc_recs: list[Record] = []
        self.cc_sent = False
        self.bc: Any = None
        self.reset_phase()
        # root-level memory
        self.r_isolated = False

    def reset_phase(self) -> None:
        self.fd_sr = -1
        self.fd_recv: dict[int, int] = {}
        self.sel_target: int | None = None
        self.is_des = False
        self.des_v: int | None = None
        self.in_edges: dict[int, list] = {}
        self.pcolor: int | None = None
        self.drop = False
        self.t_out_marked = False
        self.t_in: set[int] = set()
        self.level_in: int | None = None
        self.bit_in: int | None = None
        self.sum_in: list[tuple[int, int]] = []

    @property
    def is_root(self) -> bool:
        return self.parent is None

    def ext_neighbors(self) -> list[int]:
        p = self.part
        return [w for w, q in self.nbr_part.items() if q != p]


Callback = Callable[..., Any]


class TreeBroadcast:
    """Roots push a payload down their tree; every reached node may message other parts."""

    def __init__(
        self,
        payloads: dict[int, Any],
        token: int,
        on_bcast: Callback | None,
        on_cross: Callback | None,
        gather: bool,
        pruned: bool,
    ) -> None:
        self.payloads = payloads
        self.token = token
        self.on_bcast = on_bcast
        self.on_cross = on_cross
        self.gather = gather
        self.pruned = pruned
        self.leaves: list[int] = []

    def step(self, ctx: NodeContext, st: Mem, inbox: dict) -> Step:
        payload = self.payloads.pop(ctx.node, None) if st.parent is None else None
        for sender, msg in inbox.items():
            if sender == st.parent and st.token != self.token:
                payload = msg
            elif self.on_cross is not None:
                self.on_cross(ctx, st, sender, msg)
        if payload is None:
            return Step(st)
        st.token = self.token
        st.bc = payload
        targets = st.rel_children if self.pruned else st.children
        send = [(c, payload) for c in targets]
        if self.gather:
            st.cc_wait = len(targets)
            st.cc_recs = []
            st.cc_sent = False
            if not targets:
                self.leaves.append(ctx.node)
        if self.on_bcast is not None:
            extra = self.on_bcast(ctx, st, payload)
            if extra:
                send.extend(extra)
        return Step(st, send)


class TreeConvergecast:
    """Children report to parents; each node folds records with ``combine`` before forwarding.

    Several records are sent as separate messages on consecutive rounds; the
    last one carries an end flag so the parent knows the child is done.
    """

    def __init__(self, token: int, combine: Callback, at_root: Callback) -> None:
        self.token = token
        self.combine = combine
        self.at_root = at_root

    def step(self, ctx: NodeContext, st: Mem, inbox: dict) -> Step:
        if st.token != self.token:
            return Step(st)
        for msg in inbox.values():
            rec, last = msg
            if rec is not None:
                st.cc_recs.append(rec)
            if last:
                st.cc_wait -= 1
        if st.cc_wait or st.cc_sent:
            return Step(st)
        st.cc_sent = True
        out = self.combine(ctx, st, st.cc_recs)
        if st.parent is None:
            self.at_root(ctx, st, out)
            return Step(st)
        if not out:
            return Step(st, [(st.parent, (None, 1))])
        send = [(st.parent, (rec, 0)) for rec in out[:-1]]
        send.append((st.parent, (out[-1], 1)))
        return Step(st, send)


class CrossExchange:
    """Nodes listed in ``outgoing`` send their messages; receivers run ``on_cross``."""

    def __init__(self, outgoing: dict[int, list], on_cross: Callback) -> None:
        self.outgoing = outgoing
        self.on_cross = on_cross

    def step(self, ctx: NodeContext, st: Mem, inbox: dict) -> Step:
        for sender, msg in inbox.items():
            self.on_cross(ctx, st, sender, msg)
        return Step(st, self.outgoing.pop(ctx.node, None))


class Announce:
    """Selected nodes emit a local output without communicating."""

    def __init__(self, outputs: dict[int, Any]) -> None:
        self.outputs = outputs

    def step(self, ctx: NodeContext, st: Any, inbox: dict) -> Step:
        return Step(st, None, self.outputs.get(ctx.node))


def combine_sum(width: int) -> Callback:
    """Combine that adds fixed-width numeric records, seeded with a local contribution."""

    def factory(local: Callback) -> Callback:
        def combine(ctx: NodeContext, st: Mem, recs: list[Record]) -> list[Record]:
            acc = list(local(ctx, st))
            for rec in recs:
                for i in range(width):
                    acc[i] += rec[i]
            return [tuple(acc)]

        return combine

    return factory


class AuxRunner:
    """Runs aux-rounds over the engine on a shared memory map."""

    def __init__(self, engine: Engine, mem: dict[int, Mem]) -> None:
        self.engine = engine
        self.mem = mem
        self._token = 0
        self.aux_rounds = 0

    def roots(self) -> list[int]:
        return [v for v, st in self.mem.items() if st.parent is None]

    def aux_round(
        self,
        root_payload: Callable[[Mem], Any],
        on_bcast: Callback | None = None,
        on_cross: Callback | None = None,
        combine: Callback | None = None,
        at_root: Callback | None = None,
        pruned: bool = False,
    ) -> int:
        """One broadcast plus (optionally) one convergecast; returns the number of participating parts."""
        payloads = {}
        for r in self.roots():
            st = self.mem[r]
            if st.r_isolated:
                continue
            pl = root_payload(st)
            if pl is not None:
                payloads[r] = pl
        if not payloads:
            return 0
        self._token += 1
        self.aux_rounds += 1
        token = self._token
        gather = combine is not None
        bc = TreeBroadcast(payloads, token, on_bcast, on_cross, gather, pruned)
        count = len(payloads)
        self.engine.execute(bc, self.mem, start=list(payloads))
        if gather:
            cc = TreeConvergecast(token, combine, at_root or (lambda ctx, st, out: None))
            self.engine.execute(cc, self.mem, start=bc.leaves)
        return count

    def cross_exchange(self, outgoing: dict[int, list], on_cross: Callback) -> None:
        if not outgoing:
            return
        self.engine.execute(CrossExchange(outgoing, on_cross), self.mem, start=list(outgoing))

    def announce(self, outputs: dict[int, Any]) -> None:
        if outputs:
            self.engine.execute(Announce(outputs), self.mem, start=list(outputs))


__all__ = [
    "Announce",
    "AuxRunner",
    "CrossExchange",
    "Mem",
    "Reject",
    "TreeBroadcast",
    "TreeConvergecast",
    "combine_sum",
]
