"""Instance generators: random planar graphs, far families and high-girth graphs."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Literal

from .core import Edge, Graph, norm_edge

PropertyTag = Literal["planarity", "bipartiteness", "cycle-freeness", "minor-freeness"]
FarKind = Literal["k5-chain", "triangle-chain", "cycle-bundle"]


@dataclass(frozen=True)
class FarInstance:
    graph: Graph
    known_distance: int
    property_tag: str
    exact: bool = True

    def far_ratio(self) -> float:
        """Largest epsilon for which the instance is certified epsilon-far (strictly)."""
        return self.known_distance / self.graph.m if self.graph.m else 0.0


# ---------------------------------------------------------------------------
# random planar graphs
# ---------------------------------------------------------------------------


def gen_random_planar(n: int, edge_density: float, seed: int) -> Graph:
    """Connected planar graph with ``round(density * (3n - 6))`` edges.

    A random recursive tree is embedded first; further edges are inserted as
    chords of randomly chosen faces of the current embedding, which keeps the
    embedding planar at every step.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= edge_density <= 1.0:
        raise ValueError("edge_density must lie in [0, 1]")
    rng = random.Random(seed)
    if n == 1:
        return Graph(1)
    rotation: dict[int, list[int]] = {0: []}
    edges: set[Edge] = set()
    for v in range(1, n):
        p = rng.randrange(v)
        rotation[v] = [p]
        rot_p = rotation[p]
        rot_p.insert(rng.randrange(len(rot_p) + 1), v)
        edges.add(norm_edge(p, v))
    target = max(n - 1, round(edge_density * (3 * n - 6))) if n >= 3 else n - 1
    faces = _trace_faces(rotation)
    while len(edges) < target:
        chord = _random_chord(faces, edges, rng)
        if chord is None:
            break
        fi, i, j = chord
        face = faces[fi]
        a, b = face[i][0], face[j][0]
        p_a, p_b = face[i - 1][0], face[j - 1][0]
        _insert_after(rotation[a], p_a, b)
        _insert_after(rotation[b], p_b, a)
        edges.add(norm_edge(a, b))
        faces[fi] = face[i:j] + [(b, a)]
        faces.append(face[j:] + face[:i] + [(a, b)])
    return Graph(n, edges)


def _insert_after(seq: list[int], anchor: int, new: int) -> None:
    seq.insert(seq.index(anchor) + 1, new)


def _trace_faces(rotation: dict[int, list[int]]) -> list[list[tuple[int, int]]]:
    succ = {v: {seq[i]: seq[(i + 1) % len(seq)] for i in range(len(seq))} for v, seq in rotation.items()}
    used: set[tuple[int, int]] = set()
    faces = []
    for u in sorted(rotation):
        for v in rotation[u]:
            if (u, v) in used:
                continue
            face = []
            a, b = u, v
            while (a, b) not in used:
                used.add((a, b))
                face.append((a, b))
                a, b = b, succ[b][a]
            faces.append(face)
    return faces


def _random_chord(faces, edges, rng: random.Random, attempts: int = 64):
    """Pick a face and two corners that can be joined by a new edge."""
    weights = [len(f) for f in faces]
    total = sum(weights)
    if total == 0:
        return None
    for _ in range(attempts):
        fi = rng.choices(range(len(faces)), weights=weights)[0]
        face = faces[fi]
        if len(face) < 4:
            continue
        i, j = sorted(rng.sample(range(len(face)), 2))
        a, b = face[i][0], face[j][0]
        if a != b and norm_edge(a, b) not in edges:
            return fi, i, j
    # exhaustive fallback keeps the generator total when random probing is unlucky
    order = list(range(len(faces)))
    rng.shuffle(order)
    for fi in order:
        face = faces[fi]
        if len(face) < 4:
            continue
        for i, j in combinations(range(len(face)), 2):
            a, b = face[i][0], face[j][0]
            if a != b and norm_edge(a, b) not in edges:
                return fi, i, j
    return None


# ---------------------------------------------------------------------------
# far families
# ---------------------------------------------------------------------------


def gen_far_family(kind: FarKind, t: int, cycle_length: int = 4) -> FarInstance:
    """Blocks joined in a chain by bridges from the last node of one block to the first of the next.

    Bridges lie on no cycle, so every block has to be repaired separately and
    the distance is exactly ``t`` for all three kinds.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    if kind == "k5-chain":
        size, tag = 5, "planarity"
        block = list(combinations(range(5), 2))
    elif kind == "triangle-chain":
        size, tag = 3, "bipartiteness"
        block = [(0, 1), (1, 2), (0, 2)]
    elif kind == "cycle-bundle":
        if cycle_length < 3:
            raise ValueError("cycle_length must be at least 3")
        size, tag = cycle_length, "cycle-freeness"
        block = [(i, (i + 1) % size) for i in range(size)]
    else:
        raise ValueError(f"unknown family {kind!r}")
    edges = []
    for b in range(t):
        base = b * size
        edges.extend((base + x, base + y) for x, y in block)
        if b + 1 < t:
            edges.append((base + size - 1, base + size))
    return FarInstance(Graph(size * t, edges), t, tag, exact=True)


# ---------------------------------------------------------------------------
# high-girth lower-bound construction
# ---------------------------------------------------------------------------


def lower_bound_c(k: int, density_scale: float) -> int:
    """The constant c(k), clamped to at least 1 so the girth target stays finite."""
    return max(1, math.ceil(math.log2(density_scale * k * k)))


def lower_bound_girth_target(n: int, k: int, density_scale: float) -> int:
    return math.ceil(math.log2(n) / lower_bound_c(k, density_scale))


def default_density_scale(k: int) -> float:
    """Scale giving expected degree about 4."""
    return 4.0 / (k * k)


def gen_lower_bound_instance(n: int, k: int, density_scale: float | None = None, seed: int = 0) -> Graph:
    """Sample G(n, p) and delete one edge from every cycle shorter than the girth target."""
    if k < 3 or n < k:
        raise ValueError("need n >= k >= 3")
    scale = default_density_scale(k) if density_scale is None else density_scale
    if scale <= 0:
        raise ValueError("density_scale must be positive")
    p = scale * k * k / n
    if not 0.0 < p <= 1.0:
        raise ValueError(f"invalid edge probability p={p}")
    rng = random.Random(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                adj[u].add(v)
                adj[v].add(u)
    target = lower_bound_girth_target(n, k, scale)
    while True:
        cycle = _shortest_cycle_below(adj, target)
        if cycle is None:
            break
        cyc_edges = [norm_edge(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]
        u, v = min(cyc_edges)
        adj[u].discard(v)
        adj[v].discard(u)
    return Graph(n, ((u, v) for u in range(n) for v in adj[u] if u < v))


def _shortest_cycle_below(adj: list[set[int]], bound: int) -> list[int] | None:
    """Shortest cycle of length < bound, ties broken by BFS root then closing edge."""
    best: tuple[int, int, tuple[int, int]] | None = None
    best_cycle: list[int] | None = None
    depth_cap = bound // 2
    for r in range(len(adj)):
        if not adj[r]:
            continue
        dist = {r: 0}
        parent = {r: -1}
        queue = deque([r])
        while queue:
            x = queue.popleft()
            if dist[x] >= depth_cap:
                continue
            for y in sorted(adj[x]):
                if y == parent[x]:
                    continue
                if y in dist:
                    length = dist[x] + dist[y] + 1
                    key = (length, r, norm_edge(x, y))
                    if length < bound and (best is None or key < best):
                        best = key
                        best_cycle = _closed_walk(parent, x, y)
                else:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
    return best_cycle


def _closed_walk(parent: dict[int, int], x: int, y: int) -> list[int]:
    px, py = [x], [y]
    while parent[px[-1]] != -1:
        px.append(parent[px[-1]])
    while parent[py[-1]] != -1:
        py.append(parent[py[-1]])
    # both paths end at the root; drop the shared suffix except the meeting node
    while len(px) > 1 and len(py) > 1 and px[-2] == py[-2]:
        px.pop()
        py.pop()
    return px + py[-2::-1]


# ---------------------------------------------------------------------------
# girth
# ---------------------------------------------------------------------------


def girth(g: Graph) -> float:
    """Length of a shortest cycle; ``math.inf`` for forests."""
    best = math.inf
    adj = g.adjacency
    for r in range(g.n):
        dist = {r: 0}
        parent = {r: -1}
        queue = deque([r])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y in adj[x]:
                if y == parent[x]:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                else:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
    return best
