"""Exact planarity with embedding extraction, plus an independent minor search."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from itertools import combinations

from ..graph.core import Graph, RotationSystem
from .dmp import planar_rotation


@dataclass(frozen=True)
class EmbeddingWithFaces:
    rotation: RotationSystem
    faces: list[list[tuple[int, int]]]

    @property
    def face_count(self) -> int:
        isolated = sum(1 for seq in self.rotation.order.values() if not seq)
        return len(self.faces) + isolated


def embed(adjacency) -> RotationSystem | None:
    rot = planar_rotation(adjacency)
    return None if rot is None else RotationSystem(rot)


def is_planar(g: Graph) -> tuple[bool, EmbeddingWithFaces | None]:
    rot = embed(g.adjacency_map())
    if rot is None:
        return False, None
    return True, EmbeddingWithFaces(rot, rot.faces())


def planar(g: Graph) -> bool:
    return planar_rotation(g.adjacency_map()) is not None


# ---------------------------------------------------------------------------
# Kuratowski cross-check through K5 / K3,3 minors
# ---------------------------------------------------------------------------


def _branch_assignments(n: int, k: int) -> Iterator[list[int]]:
    """Assign each node a branch set in 0..k-1 or -1 (unused), in canonical first-use order."""
    assign = [-1] * n

    def rec(i: int, used: int) -> Iterator[list[int]]:
        if used + (n - i) < k:
            return
        if i == n:
            if used == k:
                yield assign
            return
        assign[i] = -1
        yield from rec(i + 1, used)
        for b in range(min(used + 1, k)):
            assign[i] = b
            yield from rec(i + 1, max(used, b + 1))
        assign[i] = -1

    yield from rec(0, 0)


def _connected_blocks(g: Graph, assign: list[int], k: int) -> bool:
    for b in range(k):
        members = [v for v, a in enumerate(assign) if a == b]
        allowed = set(members)
        if len(g.bfs_distances(members[0], allowed)) != len(members):
            return False
    return True


def _block_adjacency(g: Graph, assign: list[int]) -> set[tuple[int, int]]:
    out = set()
    for u, v in g.edges:
        a, b = assign[u], assign[v]
        if a >= 0 and b >= 0 and a != b:
            out.add((min(a, b), max(a, b)))
    return out


def has_k5_minor(g: Graph) -> bool:
    full = set(combinations(range(5), 2))
    for assign in _branch_assignments(g.n, 5):
        if full <= _block_adjacency(g, assign) and _connected_blocks(g, assign, 5):
            return True
    return False


def has_k33_minor(g: Graph) -> bool:
    splits = [(set(s), set(range(6)) - set(s)) for s in combinations(range(6), 3) if 0 in s]
    for assign in _branch_assignments(g.n, 6):
        adj = _block_adjacency(g, assign)
        if len(adj) < 9:
            continue
        for left, right in splits:
            if all((min(a, b), max(a, b)) in adj for a in left for b in right):
                if _connected_blocks(g, assign, 6):
                    return True
                break
    return False


def kuratowski_planar(g: Graph) -> bool:
    """Planarity by Wagner's characterization; exponential, meant for n <= 8."""
    if g.n >= 3 and g.m > 3 * g.n - 6:
        return False
    return not (has_k5_minor(g) or has_k33_minor(g))
