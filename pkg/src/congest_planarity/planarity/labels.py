"""Label algebra: ordering, cycle sides and violation checks computed from labels only.

Everything here is a pure function of the data an edge owner holds after the
label exchange: its endpoints' node labels, edge labels and degrees, plus a
broadcast cycle descriptor. No tree walks are needed.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache
from typing import NamedTuple

Label = tuple[int, ...]


class Side(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    ON_CYCLE = "on_cycle"


class Order(str, Enum):
    LT = "lt"
    EQ = "eq"
    GT = "gt"


class CycleDescriptor(NamedTuple):
    """Everything about a sampled non-tree edge ``(u, v)`` with ``lu < lv``."""

    lu: Label
    lv: Label
    euv: int
    evu: int
    du: int
    dv: int

    def as_payload(self) -> tuple:
        return (self.lu, self.lv, self.euv, self.evu, self.du, self.dv)


class EndpointInfo(NamedTuple):
    """One endpoint of a non-tree edge: its label, the edge's label there, and its degree."""

    label: Label
    edge_label: int
    degree: int


def make_descriptor(a: EndpointInfo, b: EndpointInfo) -> CycleDescriptor:
    if b.label < a.label:
        a, b = b, a
    return CycleDescriptor(a.label, b.label, a.edge_label, b.edge_label, a.degree, b.degree)


def lex_compare(a: Label, b: Label) -> Order:
    """Lexicographic order in which a proper prefix is the smaller label."""
    if a == b:
        return Order.EQ
    return Order.LT if a < b else Order.GT


def is_prefix(p: Label, x: Label) -> bool:
    return x[: len(p)] == p


def lcp_len(a: Label, b: Label) -> int:
    k = min(len(a), len(b))
    i = 0
    while i < k and a[i] == b[i]:
        i += 1
    return i


def edge_side_at_cycle_node(k: int, a: int, b: int, c: int) -> Side:
    """Side of edge ``c`` at a cycle node whose cycle edges are ``a`` (next) and ``b`` (previous).

    Inside means strictly between ``a`` and ``b`` walking counter-clockwise from ``a``.
    """
    if a == b or c in (a, b) or not all(1 <= x <= k for x in (a, b, c)):
        raise ValueError(f"invalid edge labels a={a} b={b} c={c} for degree {k}")
    return Side.INSIDE if (c - a) % k < (b - a) % k else Side.OUTSIDE


def _strictly_between(a: int, b: int, c: int) -> bool:
    # Same answer as the modular test for every k >= max(a, b, c), so the
    # degree of intermediate cycle nodes is never needed.
    if a < b:
        return a < c < b
    return c > a or c < b


def is_degenerate(desc: CycleDescriptor) -> bool:
    """True when ``u`` is an ancestor of ``v``, so the cycle's top node is ``u`` itself."""
    return is_prefix(desc.lu, desc.lv)


@lru_cache(maxsize=8192)
def _top_depth(desc: CycleDescriptor) -> int:
    return lcp_len(desc.lu, desc.lv)


def on_cycle(lx: Label, desc: CycleDescriptor) -> bool:
    k = len(lx)
    return k >= _top_depth(desc) and (desc.lu[:k] == lx or desc.lv[:k] == lx)


def cycle_neighbor_labels(lw: Label, desc: CycleDescriptor) -> tuple[int, int]:
    """Edge labels at on-cycle node ``w`` of its successor and predecessor on the cycle.

    The cycle runs from the top node ``y`` down to ``u``, across ``(u, v)``,
    and from ``v`` back up to ``y``. Label 1 is always the parent edge.
    """
    lu, lv = desc.lu, desc.lv
    ly = _top_depth(desc)
    if lw == lu:
        return desc.euv, (lv[len(lu)] if ly == len(lu) else 1)
    if lw == lv:
        return 1, desc.evu
    if len(lw) == ly:
        return lu[ly], lv[ly]
    if is_prefix(lw, lu):
        return lu[len(lw)], 1
    return 1, lv[len(lw)]


def classify_point(lx: Label, desc: CycleDescriptor) -> Side:
    """Position of node ``x`` relative to the fundamental cycle of ``desc``."""
    if on_cycle(lx, desc):
        return Side.ON_CYCLE
    lu, lv = desc.lu, desc.lv
    if _top_depth(desc) == len(lu):
        return _classify_by_nearest(lx, desc)
    if lu < lx < lv:
        if lx[: len(lu)] == lu:
            return Side.INSIDE if lx[len(lu)] > desc.euv else Side.OUTSIDE
        return Side.INSIDE
    if lx[: len(lv)] == lv:
        return Side.INSIDE if lx[len(lv)] < desc.evu else Side.OUTSIDE
    return Side.OUTSIDE


def _classify_by_nearest(lx: Label, desc: CycleDescriptor) -> Side:
    """Locate the cycle node nearest to ``x`` and the first edge toward ``x`` there."""
    ly = _top_depth(desc)
    p = max(lcp_len(lx, desc.lu), lcp_len(lx, desc.lv))
    if p >= ly:
        lw, z = lx[:p], lx[p]
    else:
        lw, z = desc.lu[:ly], 1
    a, b = cycle_neighbor_labels(lw, desc)
    return Side.INSIDE if _strictly_between(a, b, z) else Side.OUTSIDE


def endpoint_side(info: EndpointInfo, desc: CycleDescriptor) -> Side:
    """Side of a node off the cycle, or the side of the incident edge at an on-cycle node."""
    pos = classify_point(info.label, desc)
    if pos is not Side.ON_CYCLE:
        return pos
    a, b = cycle_neighbor_labels(info.label, desc)
    return Side.INSIDE if _strictly_between(a, b, info.edge_label) else Side.OUTSIDE


def is_violation(e_prime: tuple[EndpointInfo, EndpointInfo], desc: CycleDescriptor) -> bool:
    """Whether non-tree edge ``e_prime`` is in violation with the cycle of ``desc``.

    All three cases (chord leaving on different sides, an inside node joined
    to an outside node, an on-cycle endpoint whose edge points to the side
    opposite the other endpoint) reduce to the two endpoint sides differing.
    """
    p, q = e_prime
    if {p.label, q.label} == {desc.lu, desc.lv}:
        return False
    return endpoint_side(p, desc) is not endpoint_side(q, desc)
