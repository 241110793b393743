"""Plain-text edge-list format and the JSON sidecar for far instances."""

from __future__ import annotations

import json
from pathlib import Path

from .core import Graph, GraphError


class GraphParseError(GraphError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def parse_graph(text: str) -> Graph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"``.

    Blank lines are skipped. Errors carry the 1-based line number.
    """
    rows = [(i + 1, line.split()) for i, line in enumerate(text.splitlines())]
    rows = [(no, toks) for no, toks in rows if toks]
    if not rows:
        raise GraphParseError("empty input", 1)
    head_no, head = rows[0]
    if len(head) != 2:
        raise GraphParseError("header must be 'n m'", head_no)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphParseError("header must contain two integers", head_no) from None
    if n < 0 or m < 0:
        raise GraphParseError("negative counts in header", head_no)
    body = rows[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else head_no)
        raise GraphParseError(f"expected {m} edge lines, found {len(body)}", where)
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for no, toks in body:
        if len(toks) != 2:
            raise GraphParseError("edge line must be 'u v'", no)
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphParseError("edge endpoints must be integers", no) from None
        if u == v:
            raise GraphParseError(f"self-loop at node {u}", no)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"endpoint out of range 0..{n - 1}", no)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphParseError(f"duplicate edge {key}", no)
        seen.add(key)
        edges.append(key)
    return Graph(n, edges)


def format_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())


def save_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def save_sidecar(path: str | Path, prop: str, distance: int, exact: bool) -> Path:
    target = sidecar_path(path)
    target.write_text(json.dumps({"property": prop, "distance": distance, "exact": exact}, indent=2) + "\n")
    return target


def load_sidecar(path: str | Path) -> dict | None:
    target = sidecar_path(path)
    if not target.exists():
        return None
    return json.loads(target.read_text())
