"""Exact distances to properties, partition verification and spanner stretch."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import asdict, dataclass, field
from itertools import combinations

from ..graph.core import Edge, Graph, norm_edge
from .planar import planar


class IntractableInstance(ValueError):
    """The requested exhaustive search exceeds the tractability guard."""


@dataclass(frozen=True)
class AtLeast:
    """Lower bound returned when no repair of size <= cap exists."""

    value: int


def distance_to_property(
    g: Graph,
    holds: Callable[[Graph], bool],
    cap: int,
    min_removals: int = 0,
) -> int | AtLeast:
    """Smallest number of edge removals after which ``holds`` is true."""
    if g.m > 40 and cap > 3:
        raise IntractableInstance(f"m={g.m} with cap={cap} exceeds the search guard (m <= 40 or cap <= 3)")
    edges = g.sorted_edges()
    for d in range(max(0, min_removals), cap + 1):
        for removed in combinations(edges, d):
            drop = set(removed)
            h = Graph(g.n, (e for e in edges if e not in drop))
            if holds(h):
                return d
    return AtLeast(cap + 1)


def distance_to_planarity(g: Graph, cap: int) -> int | AtLeast:
    """Euler's bound prunes every size below ``m - (3n - 6)``."""
    floor = max(0, g.m - (3 * g.n - 6)) if g.n >= 3 else 0
    if floor > cap:
        if g.m > 40 and cap > 3:
            raise IntractableInstance(f"m={g.m} with cap={cap} exceeds the search guard (m <= 40 or cap <= 3)")
        return AtLeast(cap + 1)
    return distance_to_property(g, planar, cap, floor)


def is_bipartite(g: Graph) -> bool:
    color: dict[int, int] = {}
    for s in range(g.n):
        if s in color:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in g.neighbors(x):
                if y not in color:
                    color[y] = 1 - color[x]
                    stack.append(y)
                elif color[y] == color[x]:
                    return False
    return True


def is_forest(g: Graph) -> bool:
    return g.m == g.n - len(g.components())


def distance_to_cycle_freeness(g: Graph) -> int:
    """Exact in closed form: the cyclomatic number."""
    return g.m - g.n + len(g.components())


# ---------------------------------------------------------------------------
# partition verification
# ---------------------------------------------------------------------------


@dataclass
class PartReport:
    root: int
    size: int
    connected: bool
    diameter: int | None
    tree_valid: bool


@dataclass
class PartitionReport:
    cut_edges: int
    part_count: int
    max_diameter: int
    all_connected: bool
    all_trees_valid: bool
    parts: list[PartReport] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def induced_diameter(g: Graph, members: Iterable[int]) -> int | None:
    """Diameter of the induced subgraph; ``None`` if it is disconnected."""
    keep = set(members)
    best = 0
    for s in keep:
        dist = g.bfs_distances(s, keep)
        if len(dist) != len(keep):
            return None
        best = max(best, max(dist.values()))
    return best


def verify_partition(
    g: Graph,
    part_of: Mapping[int, int],
    parent: Mapping[int, int | None] | None = None,
) -> PartitionReport:
    """Recompute cut size, connectivity, diameters and tree validity from scratch.

    ``part_of`` maps each node to its part identifier (the root's id). When
    ``parent`` is given, each part must be spanned by the parent links, which
    must use graph edges, stay inside the part, and lead to the root.
    """
    members: dict[int, list[int]] = {}
    for v in g.nodes():
        members.setdefault(part_of[v], []).append(v)
    cut = sum(1 for u, v in g.edges if part_of[u] != part_of[v])
    reports = []
    for root, mem in sorted(members.items()):
        diam = induced_diameter(g, mem)
        tree_ok = True
        if parent is not None:
            tree_ok = _tree_valid(g, root, mem, part_of, parent)
        reports.append(PartReport(root, len(mem), diam is not None, diam, tree_ok))
    return PartitionReport(
        cut_edges=cut,
        part_count=len(members),
        max_diameter=max((r.diameter or 0) for r in reports) if reports else 0,
        all_connected=all(r.connected for r in reports),
        all_trees_valid=all(r.tree_valid for r in reports),
        parts=reports,
    )


def _tree_valid(g: Graph, root: int, mem: list[int], part_of: Mapping[int, int], parent: Mapping[int, int | None]) -> bool:
    if root not in mem or parent.get(root) is not None:
        return False
    for v in mem:
        seen = {v}
        x = v
        while parent.get(x) is not None:
            p = parent[x]
            if part_of.get(p) != part_of[v] or not g.has_edge(x, p) or p in seen:  # type: ignore[arg-type]
                return False
            seen.add(p)  # type: ignore[arg-type]
            x = p  # type: ignore[assignment]
        if x != root:
            return False
    return True


# ---------------------------------------------------------------------------
# spanners
# ---------------------------------------------------------------------------


def stretch(g: Graph, spanner_edges: Iterable[Edge]) -> float:
    """Maximum over edges of ``g`` of their endpoint distance in the spanner."""
    kept = {norm_edge(u, v) for u, v in spanner_edges}
    h = Graph(g.n, kept)
    removed: dict[int, list[int]] = {}
    for u, v in g.edges:
        if (u, v) not in kept:
            removed.setdefault(u, []).append(v)
    worst = 1.0 if g.m else 0.0
    for u, targets in removed.items():
        dist = h.bfs_distances(u)
        for v in targets:
            if v not in dist:
                return float("inf")
            worst = max(worst, float(dist[v]))
    return worst
