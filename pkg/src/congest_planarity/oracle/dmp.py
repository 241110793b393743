"""Path-addition planarity test that produces a combinatorial embedding.

Each biconnected block is embedded separately. Starting from a cycle, the
algorithm repeatedly picks a fragment (a bridge of the embedded subgraph),
preferring one that fits into a single face, and routes a path of it through
that face. A fragment with no admissible face certifies non-planarity. Block
rotations are concatenated at cut vertices.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Hashable, Mapping, Sequence

import networkx as nx

Node = Hashable


class _Fragment:
    __slots__ = ("att", "edges", "inner")

    def __init__(self, att: frozenset, inner: set, edges: list) -> None:
        self.att = att
        self.inner = inner
        self.edges = edges


def planar_rotation(adjacency: Mapping[Node, Sequence[Node]]) -> dict[Node, list[Node]] | None:
    """Rotation system of a planar embedding, or ``None`` if the graph is not planar."""
    nodes = list(adjacency)
    edge_count = sum(len(v) for v in adjacency.values()) // 2
    if len(nodes) >= 3 and edge_count > 3 * len(nodes) - 6:
        return None
    rotation: dict[Node, list[Node]] = {v: [] for v in nodes}
    if edge_count == 0:
        return rotation
    h = nx.Graph()
    h.add_nodes_from(nodes)
    for u, nbrs in adjacency.items():
        for v in nbrs:
            h.add_edge(u, v)
    for block_edges in nx.biconnected_component_edges(h):
        block_edges = list(block_edges)
        if len(block_edges) == 1:
            u, v = block_edges[0]
            rotation[u].append(v)
            rotation[v].append(u)
            continue
        block_rot = _embed_block(block_edges)
        if block_rot is None:
            return None
        for v, seq in block_rot.items():
            rotation[v].extend(seq)
    return rotation


def _embed_block(block_edges: list[tuple[Node, Node]]) -> dict[Node, list[Node]] | None:
    adj: dict[Node, list[Node]] = {}
    for u, v in block_edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    n = len(adj)
    if len(block_edges) > 3 * n - 6:
        return None
    cycle = _find_cycle(adj)

    faces: dict[int, list[Node]] = {0: list(cycle), 1: list(reversed(cycle))}
    face_sets: dict[int, set[Node]] = {0: set(cycle), 1: set(cycle)}
    vertex_faces: dict[Node, set[int]] = {v: {0, 1} for v in cycle}
    next_face = 2
    embedded: set[Node] = set(cycle)
    cyc_edges = {frozenset((cycle[i], cycle[(i + 1) % len(cycle)])) for i in range(len(cycle))}
    pool = [e for e in block_edges if frozenset(e) not in cyc_edges]

    frags: dict[int, _Fragment] = {}
    admissible: dict[int, set[int]] = {}
    face_users: dict[int, set[int]] = {0: set(), 1: set()}
    next_frag = 0

    def register(new_frags: list[_Fragment]) -> bool:
        nonlocal next_frag
        for fr in new_frags:
            fid = next_frag
            next_frag += 1
            adm = set.intersection(*(vertex_faces[a] for a in fr.att))
            if not adm:
                return False
            frags[fid] = fr
            admissible[fid] = adm
            for f in adm:
                face_users[f].add(fid)
        return True

    if not register(_fragments(pool, embedded)):
        return None

    while frags:
        chosen = None
        for fid, adm in admissible.items():
            if len(adm) == 1:
                chosen = fid
                break
        if chosen is None:
            chosen = next(iter(frags))
        fr = frags.pop(chosen)
        adm = admissible.pop(chosen)
        for f in adm:
            face_users[f].discard(chosen)
        face_id = min(adm)
        path = _fragment_path(fr)

        # split the face along the path
        face = faces.pop(face_id)
        face_sets.pop(face_id)
        users = face_users.pop(face_id)
        a, b = path[0], path[-1]
        i, j = face.index(a), face.index(b)
        k = len(face)
        seg_ab = [face[(i + s) % k] for s in range((j - i) % k + 1)]
        seg_ba = [face[(j + s) % k] for s in range((i - j) % k + 1)]
        inner_path = path[1:-1]
        f1 = seg_ab + inner_path[::-1]
        f2 = seg_ba + inner_path
        id1, id2 = next_face, next_face + 1
        next_face += 2
        faces[id1], faces[id2] = f1, f2
        face_sets[id1], face_sets[id2] = set(f1), set(f2)
        face_users[id1], face_users[id2] = set(), set()
        for v in face:
            vertex_faces[v].discard(face_id)
        for v in inner_path:
            vertex_faces[v] = set()
            embedded.add(v)
        for v in f1:
            vertex_faces[v].add(id1)
        for v in f2:
            vertex_faces[v].add(id2)

        for uid in users:
            att = frags[uid].att
            adm_u = admissible[uid]
            adm_u.discard(face_id)
            for nf in (id1, id2):
                if att <= face_sets[nf]:
                    adm_u.add(nf)
                    face_users[nf].add(uid)
            if not adm_u:
                return None

        path_edges = {frozenset((path[s], path[s + 1])) for s in range(len(path) - 1)}
        rest = [e for e in fr.edges if frozenset(e) not in path_edges]
        if rest and not register(_fragments(rest, embedded)):
            return None

    succ: dict[Node, dict[Node, Node]] = {v: {} for v in adj}
    for face in faces.values():
        k = len(face)
        for s in range(k):
            p, v, w = face[s - 1], face[s], face[(s + 1) % k]
            succ[v][p] = w
    rotation: dict[Node, list[Node]] = {}
    for v, nbrs in adj.items():
        start = nbrs[0]
        seq = [start]
        x = succ[v][start]
        while x != start:
            seq.append(x)
            x = succ[v][x]
        if len(seq) != len(nbrs):
            raise AssertionError("inconsistent face structure")
        rotation[v] = seq
    return rotation


def _find_cycle(adj: dict[Node, list[Node]]) -> list[Node]:
    start = next(iter(adj))
    parent = {start: None}
    depth = {start: 0}
    stack = [(start, iter(adj[start]))]
    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if w == parent[v]:
                continue
            if w in depth:
                # back edge closes a cycle through the tree path
                cyc = [v]
                x = v
                while x != w:
                    x = parent[x]
                    cyc.append(x)
                return cyc
            parent[w] = v
            depth[w] = depth[v] + 1
            stack.append((w, iter(adj[w])))
            advanced = True
            break
        if not advanced:
            stack.pop()
    raise AssertionError("biconnected block without a cycle")


def _fragments(edges: list[tuple[Node, Node]], embedded: set[Node]) -> list[_Fragment]:
    """Split unembedded edges into fragments relative to the embedded vertex set."""
    out: list[_Fragment] = []
    parent: dict[Node, Node] = {}

    def find(x: Node) -> Node:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    loose = []
    for u, v in edges:
        ue, ve = u in embedded, v in embedded
        if ue and ve:
            out.append(_Fragment(frozenset((u, v)), set(), [(u, v)]))
            continue
        loose.append((u, v))
        for x in (u, v):
            if x not in embedded and x not in parent:
                parent[x] = x
        if not ue and not ve:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    groups: dict[Node, tuple[set, set, list]] = {}
    for u, v in loose:
        inner = u if u not in embedded else v
        root = find(inner)
        att, verts, elist = groups.setdefault(root, (set(), set(), []))
        elist.append((u, v))
        for x in (u, v):
            if x in embedded:
                att.add(x)
            else:
                verts.add(x)
    for att, verts, elist in groups.values():
        out.append(_Fragment(frozenset(att), verts, elist))
    return out


def _fragment_path(fr: _Fragment) -> list[Node]:
    """A path through the fragment joining two distinct attachment vertices."""
    if not fr.inner:
        u, v = fr.edges[0]
        return [u, v]
    adj: dict[Node, list[Node]] = {}
    for u, v in fr.edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = next(a for a in sorted(fr.att, key=repr) if a in adj)
    first = next(x for x in adj[start] if x in fr.inner)
    prev = {first: start}
    queue = deque([first])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y in fr.inner:
                if y not in prev:
                    prev[y] = x
                    queue.append(y)
            elif y != start:
                path = [y, x]
                while path[-1] != start:
                    path.append(prev[path[-1]])
                return path[::-1]
    raise AssertionError("fragment with a single attachment inside a biconnected block")
