"""Immutable simple undirected graphs and rotation systems."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised when an edge list does not describe a simple graph."""


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """A simple undirected graph on nodes ``0..n-1``.

    The graph is immutable once built: adjacency lists are sorted tuples and
    the edge set is a frozenset of normalized ``(u, v)`` pairs with ``u < v``.
    """

    __slots__ = ("_adj", "_edges", "_n")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]] = ()) -> None:
        if node_count < 0:
            raise GraphError(f"negative node count {node_count}")
        buckets: list[list[int]] = [[] for _ in range(node_count)]
        seen: set[Edge] = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise GraphError(f"edge ({u}, {v}) out of range for n={node_count}")
            e = norm_edge(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
            buckets[u].append(v)
            buckets[v].append(u)
        self._n = node_count
        self._edges = frozenset(seen)
        self._adj = tuple(tuple(sorted(b)) for b in buckets)

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    def nodes(self) -> range:
        return range(self._n)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self._edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"

    # -- derived structure --------------------------------------------------

    def edge_subgraph(self, edges: Iterable[tuple[int, int]]) -> Graph:
        """Spanning subgraph on the same node set with the given edges."""
        return Graph(self._n, edges)

    def bfs_distances(self, source: int, allowed: set[int] | None = None) -> dict[int, int]:
        dist = {source: 0}
        queue = deque([source])
        adj = self._adj
        while queue:
            x = queue.popleft()
            dx = dist[x] + 1
            for y in adj[x]:
                if y not in dist and (allowed is None or y in allowed):
                    dist[y] = dx
                    queue.append(y)
        return dist

    def components(self) -> list[list[int]]:
        """Connected components as sorted node lists, ordered by smallest node."""
        seen = [False] * self._n
        comps: list[list[int]] = []
        for s in range(self._n):
            if seen[s]:
                continue
            comp = list(self.bfs_distances(s))
            for x in comp:
                seen[x] = True
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self._n <= 1 or len(self.bfs_distances(0)) == self._n

    def induced_edges(self, nodes: Iterable[int]) -> list[Edge]:
        keep = set(nodes)
        return sorted(e for e in self._edges if e[0] in keep and e[1] in keep)

    def adjacency_map(self, nodes: Iterable[int] | None = None) -> dict[int, list[int]]:
        """Adjacency restricted to ``nodes`` (all nodes when omitted)."""
        if nodes is None:
            return {u: list(self._adj[u]) for u in range(self._n)}
        keep = set(nodes)
        return {u: [v for v in self._adj[u] if v in keep] for u in sorted(keep)}

    def to_networkx(self):
        import networkx as nx

        h = nx.Graph()
        h.add_nodes_from(range(self._n))
        h.add_edges_from(self._edges)
        return h


# ---------------------------------------------------------------------------
# rotation systems
# ---------------------------------------------------------------------------


def cyclically_between(order: Sequence[int], start: int, end: int, probe: int) -> bool:
    """True when ``probe`` lies strictly between ``start`` and ``end``.

    Walks the circular sequence counter-clockwise from ``start``. The answer
    does not depend on where the sequence happens to begin.
    """
    k = len(order)
    pos = {x: i for i, x in enumerate(order)}
    a, b, c = pos[start], pos[end], pos[probe]
    return (c - a) % k < (b - a) % k and c != a


@dataclass(frozen=True)
class RotationSystem:
    """Counter-clockwise circular order of neighbors around each node."""

    order: Mapping[int, tuple[int, ...]]
    _succ: dict[int, dict[int, int]] = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        frozen = {v: tuple(seq) for v, seq in self.order.items()}
        object.__setattr__(self, "order", frozen)
        succ = {}
        for v, seq in frozen.items():
            k = len(seq)
            succ[v] = {seq[i]: seq[(i + 1) % k] for i in range(k)}
        object.__setattr__(self, "_succ", succ)

    def __getitem__(self, v: int) -> tuple[int, ...]:
        return self.order[v]

    def nodes(self) -> list[int]:
        return sorted(self.order)

    def successor(self, v: int, u: int) -> int:
        """Neighbor following ``u`` in the circular order around ``v``."""
        return self._succ[v][u]

    def between(self, w: int, start: int, end: int, probe: int) -> bool:
        return cyclically_between(self.order[w], start, end, probe)

    def edge_count(self) -> int:
        return sum(len(s) for s in self.order.values()) // 2

    def faces(self) -> list[list[tuple[int, int]]]:
        """Trace faces as dart cycles; dart ``(u, v)`` is followed by ``(v, succ_v(u))``."""
        used: set[tuple[int, int]] = set()
        out: list[list[tuple[int, int]]] = []
        for u in sorted(self.order):
            for v in self.order[u]:
                if (u, v) in used:
                    continue
                face = []
                a, b = u, v
                while (a, b) not in used:
                    used.add((a, b))
                    face.append((a, b))
                    a, b = b, self._succ[b][a]
                out.append(face)
        return out

    def face_count(self) -> int:
        """Number of faces, counting each isolated node as one face."""
        isolated = sum(1 for seq in self.order.values() if not seq)
        return len(self.faces()) + isolated

    def euler_characteristic_ok(self) -> bool:
        """Check V - E + F = 2 * (number of components)."""
        comps = _count_components(self.order)
        v = len(self.order)
        e = self.edge_count()
        return v - e + self.face_count() == 2 * comps

    def is_consistent_with(self, adjacency: Mapping[int, Sequence[int]]) -> bool:
        if set(adjacency) != set(self.order):
            return False
        return all(sorted(self.order[v]) == sorted(adjacency[v]) for v in adjacency)


def _count_components(adj: Mapping[int, Sequence[int]]) -> int:
    seen: set[int] = set()
    count = 0
    for s in adj:
        if s in seen:
            continue
        count += 1
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return count
