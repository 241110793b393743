"""Inside/outside and violations evaluated from first principles.

Sides are found by walking the tree to the fundamental cycle and reading
positions in the rotation system directly; labels are never consulted. This
is the independent reference for the label-based checks run by the nodes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..graph.core import Edge, RotationSystem, norm_edge
from ..planarity.tree import BfsTree

INSIDE, OUTSIDE, ON = "inside", "outside", "on_cycle"


@dataclass
class FundamentalCycle:
    edge: Edge
    nodes: list[int]
    succ: dict[int, int]
    pred: dict[int, int]
    top: int


def fundamental_cycle(tree: BfsTree, u: int, v: int) -> FundamentalCycle:
    """Cycle ``y -> ... -> u -> v -> ... -> y`` closed by non-tree edge ``(u, v)``."""
    pu, pv = tree.path_to_root(u), tree.path_to_root(v)
    on_v = set(pv)
    y = next(x for x in pu if x in on_v)
    down_to_u = pu[: pu.index(y) + 1][::-1]  # y ... u
    up_from_v = pv[: pv.index(y)]  # v ... (child of y)
    nodes = down_to_u + up_from_v
    k = len(nodes)
    succ = {nodes[i]: nodes[(i + 1) % k] for i in range(k)}
    pred = {nodes[i]: nodes[i - 1] for i in range(k)}
    return FundamentalCycle(norm_edge(u, v), nodes, succ, pred, y)


def node_sides(tree: BfsTree, rot: RotationSystem, cyc: FundamentalCycle) -> dict[int, str]:
    """Side of every node of the tree with respect to ``cyc``."""
    on = set(cyc.nodes)
    y = cyc.top
    side: dict[int, str] = {}
    py = tree.parent[y]
    if py is None:
        above = OUTSIDE  # no node sits outside the subtree of the root
    else:
        above = INSIDE if rot.between(y, cyc.succ[y], cyc.pred[y], py) else OUTSIDE
    queue = deque([tree.root])
    while queue:
        x = queue.popleft()
        if x in on:
            side[x] = ON
        else:
            p = tree.parent[x]
            if p is None:
                side[x] = above
            elif p in on:
                side[x] = INSIDE if rot.between(p, cyc.succ[p], cyc.pred[p], x) else OUTSIDE
            else:
                side[x] = side[p]
        queue.extend(tree.children[x])
    return side


def endpoint_side(rot: RotationSystem, cyc: FundamentalCycle, sides: dict[int, str], p: int, q: int) -> str:
    if sides[p] != ON:
        return sides[p]
    return INSIDE if rot.between(p, cyc.succ[p], cyc.pred[p], q) else OUTSIDE


def enumerate_violations(tree: BfsTree, rot: RotationSystem) -> set[tuple[Edge, Edge]]:
    """All ordered pairs ``(e', e)`` of distinct non-tree edges with ``e'`` violating the cycle of ``e``."""
    nontree = tree.nontree_edges()
    out: set[tuple[Edge, Edge]] = set()
    if len(nontree) < 2:
        return out
    for e in nontree:
        cyc = fundamental_cycle(tree, *e)
        sides = node_sides(tree, rot, cyc)
        for f in nontree:
            if f == e:
                continue
            a, b = f
            if endpoint_side(rot, cyc, sides, a, b) != endpoint_side(rot, cyc, sides, b, a):
                out.add((f, e))
    return out


def violation_pairs_for(tree: BfsTree, rot: RotationSystem, e: Edge) -> set[Edge]:
    cyc = fundamental_cycle(tree, *e)
    sides = node_sides(tree, rot, cyc)
    return {
        f
        for f in tree.nontree_edges()
        if f != e and endpoint_side(rot, cyc, sides, f[0], f[1]) != endpoint_side(rot, cyc, sides, f[1], f[0])
    }


def decompose_cycle(tree: BfsTree, rot: RotationSystem, e: Edge) -> tuple[set[Edge], set[Edge]]:
    """Split the part's edges into the inside half and the outside half around ``C(e)``.

    Both halves contain the cycle. An edge with an inside endpoint (or a chord
    leaving inside) goes to the first half, symmetrically for outside. A
    violating edge touches both sides and is placed in both.
    """
    cyc = fundamental_cycle(tree, *e)
    sides = node_sides(tree, rot, cyc)
    k = len(cyc.nodes)
    cycle_edges = {norm_edge(cyc.nodes[i], cyc.nodes[(i + 1) % k]) for i in range(k)}
    inner, outer = set(cycle_edges), set(cycle_edges)
    for u, nbrs in tree.adjacency.items():
        for v in nbrs:
            if u > v or (u, v) in cycle_edges:
                continue
            s1 = endpoint_side(rot, cyc, sides, u, v)
            s2 = endpoint_side(rot, cyc, sides, v, u)
            if INSIDE in (s1, s2):
                inner.add((u, v))
            if OUTSIDE in (s1, s2):
                outer.add((u, v))
    return inner, outer


__all__ = [
    "FundamentalCycle",
    "decompose_cycle",
    "endpoint_side",
    "enumerate_violations",
    "fundamental_cycle",
    "node_sides",
    "violation_pairs_for",
]
