"""BFS trees of parts and the ccw edge/node labeling derived from a rotation system."""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from ..graph.core import Edge, RotationSystem

Label = tuple[int, ...]


@dataclass
class BfsTree:
    """A BFS tree spanning one part.

    ``adjacency`` is the part's induced adjacency (only intra-part edges).
    Non-tree edges are owned by their higher-level endpoint, ties going to
    the smaller id.
    """

    root: int
    level: dict[int, int]
    parent: dict[int, int | None]
    children: dict[int, list[int]]
    adjacency: dict[int, list[int]]
    _nontree: list[Edge] | None = field(default=None, repr=False)

    @property
    def nodes(self) -> list[int]:
        return sorted(self.level)

    @property
    def n(self) -> int:
        return len(self.level)

    @property
    def m(self) -> int:
        return sum(len(v) for v in self.adjacency.values()) // 2

    @property
    def depth(self) -> int:
        return max(self.level.values(), default=0)

    def is_tree_edge(self, u: int, v: int) -> bool:
        return self.parent.get(u) == v or self.parent.get(v) == u

    def nontree_edges(self) -> list[Edge]:
        if self._nontree is None:
            out = []
            for u, nbrs in self.adjacency.items():
                for v in nbrs:
                    if u < v and not self.is_tree_edge(u, v):
                        out.append((u, v))
            self._nontree = sorted(out)
        return self._nontree

    @property
    def m_tilde(self) -> int:
        return len(self.nontree_edges())

    def owner(self, u: int, v: int) -> int:
        lu, lv = self.level[u], self.level[v]
        if lu != lv:
            return u if lu > lv else v
        return min(u, v)

    def path_to_root(self, x: int) -> list[int]:
        out = [x]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])  # type: ignore[arg-type]
        return out


def build_bfs_tree(adjacency: Mapping[int, Sequence[int]], root: int) -> BfsTree:
    """BFS tree where every node's parent is its smallest-id neighbor one level up.

    This is the tree a synchronous flooding produces when simultaneous offers
    are resolved in favor of the smaller sender.
    """
    level = {root: 0}
    order = [root]
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in adjacency[x]:
            if y not in level:
                level[y] = level[x] + 1
                order.append(y)
                queue.append(y)
    parent: dict[int, int | None] = {root: None}
    children: dict[int, list[int]] = {x: [] for x in level}
    for x in order[1:]:
        p = min(y for y in adjacency[x] if level.get(y) == level[x] - 1)
        parent[x] = p
        children[p].append(x)
    for kids in children.values():
        kids.sort()
    adj = {x: sorted(adjacency[x]) for x in level}
    return BfsTree(root, level, parent, children, adj)


@dataclass
class Labeling:
    """Per-node lexicographic labels and per-endpoint ccw edge labels."""

    node_label: dict[int, Label]
    edge_label: dict[int, dict[int, int]]
    degree: dict[int, int]

    def is_descendant(self, x: int, u: int) -> bool:
        lu = self.node_label[u]
        return self.node_label[x][: len(lu)] == lu


def local_edge_labels(order: Sequence[int], first: int) -> dict[int, int]:
    """Number the circular sequence 1..k counter-clockwise starting at ``first``."""
    k = len(order)
    start = list(order).index(first)
    return {order[(start + i) % k]: i + 1 for i in range(k)}


def compute_labels(tree: BfsTree, rotation: RotationSystem | Mapping[int, Sequence[int]]) -> Labeling:
    order = rotation.order if isinstance(rotation, RotationSystem) else rotation
    edge_label: dict[int, dict[int, int]] = {}
    for x in tree.level:
        seq = order[x]
        if not seq:
            edge_label[x] = {}
            continue
        p = tree.parent[x]
        edge_label[x] = local_edge_labels(seq, seq[0] if p is None else p)
    node_label: dict[int, Label] = {tree.root: ()}
    queue = deque([tree.root])
    while queue:
        x = queue.popleft()
        for c in tree.children[x]:
            node_label[c] = node_label[x] + (edge_label[x][c],)
            queue.append(c)
    degree = {x: len(order[x]) for x in tree.level}
    return Labeling(node_label, edge_label, degree)


__all__ = ["BfsTree", "Label", "Labeling", "build_bfs_tree", "compute_labels", "local_edge_labels"]
