"""Batch experiment harness.

Generates instances, runs the testers, partitioners and the spanner over seed
ranges, checks results against the oracle, and writes JSON (optionally CSV)
reports. A reject verdict is a successful run; the exit code is 0 whenever
the command completed.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from .graph.core import Graph
from .graph.generators import (
    gen_far_family,
    gen_lower_bound_instance,
    gen_random_planar,
    girth,
)
from .graph.io import (
    GraphParseError,
    load_graph,
    load_sidecar,
    save_graph,
    save_sidecar,
)
from .minorfree import (
    build_spanner,
    cut_bound,
    run_partition_deterministic,
    run_partition_randomized,
    test_bipartite,
    test_cycle_free,
)
from .oracle import (
    AtLeast,
    IntractableInstance,
    distance_to_cycle_freeness,
    distance_to_planarity,
    is_bipartite,
    is_forest,
    is_planar,
    stretch,
    verify_partition,
)
from .planarity.stage import TesterConfig, run_tester


class UsageError(ValueError):
    """Bad flag values detected after argument parsing."""


def parse_seeds(text: str) -> list[int]:
    """Accepts ``7``, ``1..100`` (inclusive) and comma-separated mixes of both."""
    seeds: list[int] = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if ".." in piece:
            lo, hi = piece.split("..", 1)
            a, b = int(lo), int(hi)
            if b < a:
                raise argparse.ArgumentTypeError(f"empty seed range {piece!r}")
            seeds.extend(range(a, b + 1))
        else:
            seeds.append(int(piece))
    if not seeds:
        raise argparse.ArgumentTypeError("no seeds given")
    return seeds


def _unit_interval(name: str) -> Callable[[str], float]:
    def conv(text: str) -> float:
        x = float(text)
        if not 0 < x < 1:
            raise argparse.ArgumentTypeError(f"{name} must lie in (0, 1), got {text}")
        return x

    return conv


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------


def _emit(report: dict, args: argparse.Namespace, rows: list[dict] | None = None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if getattr(args, "report", None):
        Path(args.report).write_text(text + "\n")
    else:
        print(text)
    if rows is not None and getattr(args, "csv", None):
        fields = sorted({k for r in rows for k in r})
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for r in rows:
                writer.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})


def _aggregate(runs: list[dict]) -> dict:
    rounds = [r["rounds"] for r in runs]
    return {
        "runs": len(runs),
        "reject_rate": sum(r["verdict"] == "reject" for r in runs) / len(runs),
        "mean_rounds": statistics.fmean(rounds),
        "max_rounds": max(rounds),
        "max_bits": max(r["max_bits"] for r in runs),
    }


def _graph_info(path: str, g: Graph) -> dict:
    info: dict[str, Any] = {"input": path, "n": g.n, "m": g.m}
    side = load_sidecar(path)
    if side is not None:
        info["known"] = side
    return info


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    out = Path(args.out)
    report: dict[str, Any] = {"family": args.family, "out": str(out)}
    if args.family == "planar":
        g = gen_random_planar(args.n, args.density, args.seed)
    elif args.family == "lower-bound":
        g = gen_lower_bound_instance(args.n, args.k, args.density_scale, args.seed)
        report["girth"] = girth(g)
    else:
        inst = gen_far_family(args.family, args.t, args.cycle_length)
        g = inst.graph
        side = save_sidecar(out, inst.property_tag, inst.known_distance, inst.exact)
        report.update(sidecar=str(side), distance=inst.known_distance, property=inst.property_tag)
    save_graph(g, out)
    report.update(n=g.n, m=g.m)
    _emit(report, args)
    return 0


def _tester_config(args: argparse.Namespace) -> TesterConfig:
    return TesterConfig(
        epsilon=args.epsilon,
        sample_constant=args.sample_constant,
        forced_embedding=args.forced_embedding,
        gh_cost_constant=args.gh_cost_constant,
        max_rounds=args.max_rounds,
        alpha=args.alpha,
    )


def cmd_test_planarity(args: argparse.Namespace) -> int:
    g = load_graph(args.input)
    cfg = _tester_config(args)
    runs = []
    for seed in args.seed:
        res = run_tester(g, cfg, seed)
        v = res.verdict
        runs.append(
            {
                "seed": seed,
                "verdict": v.verdict,
                "rounds": v.rounds,
                "modeled_round_credits": v.modeled_round_credits,
                "max_bits": res.trace.max_message_bits,
                "messages": res.trace.total_messages,
                "max_inflation": res.trace.max_inflation,
                "truncated": res.truncated,
                "rejecting": v.rejecting,
            }
        )
    report = {
        "command": "test-planarity",
        **_graph_info(args.input, g),
        "epsilon": args.epsilon,
        "forced_embedding": args.forced_embedding,
        "sample_constant": args.sample_constant,
        "gh_cost_constant": args.gh_cost_constant,
        **_aggregate(runs),
        "max_inflation": max(r["max_inflation"] for r in runs),
        "results": runs,
    }
    _emit(report, args, runs)
    return 0


def _partition(g: Graph, args: argparse.Namespace, seed: int):
    if args.delta is None:
        return run_partition_deterministic(g, args.epsilon, alpha=args.alpha, cut_target=args.cut_target, seed=seed)
    return run_partition_randomized(
        g, args.epsilon, args.delta, seed=seed, alpha=args.alpha, cut_target=args.cut_target
    )


def cmd_partition(args: argparse.Namespace) -> int:
    g = load_graph(args.input)
    runs = []
    bound = cut_bound(g, args.epsilon, args.cut_target)
    for i, seed in enumerate(args.seed):
        res = _partition(g, args, seed)
        check = verify_partition(g, res.state.part_of, res.state.parent)
        if i == 0 and args.dump:
            Path(args.dump).write_text(json.dumps(res.dump(g), indent=2, sort_keys=True) + "\n")
        runs.append(
            {
                "seed": seed,
                "rejected": res.rejected,
                "rounds": res.rounds,
                "phases": res.phases_run,
                "parts": check.part_count,
                "cut_edges": check.cut_edges,
                "within_bound": check.cut_edges <= bound,
                "max_diameter": check.max_diameter,
                "all_connected": check.all_connected,
                "all_trees_valid": check.all_trees_valid,
            }
        )
    report = {
        "command": "partition",
        **_graph_info(args.input, g),
        "epsilon": args.epsilon,
        "delta": args.delta,
        "cut_target": args.cut_target,
        "cut_bound": bound,
        "within_bound_rate": sum(r["within_bound"] for r in runs) / len(runs),
        "results": runs,
    }
    _emit(report, args, runs)
    return 0


def _cmd_property(args: argparse.Namespace, name: str, tester: Callable) -> int:
    g = load_graph(args.input)
    runs = []
    for seed in args.seed:
        res = tester(g, args.epsilon, args.delta, seed, args.alpha)
        runs.append(
            {
                "seed": seed,
                "verdict": res.verdict.verdict,
                "rounds": res.verdict.rounds,
                "max_bits": res.trace.max_message_bits,
                "cut_edges": res.partition.cut_weight,
                "rejecting": res.verdict.rejecting,
            }
        )
    report = {
        "command": name,
        **_graph_info(args.input, g),
        "epsilon": args.epsilon,
        "delta": args.delta,
        **_aggregate(runs),
        "results": runs,
    }
    _emit(report, args, runs)
    return 0


def cmd_test_cyclefree(args: argparse.Namespace) -> int:
    return _cmd_property(args, "test-cyclefree", test_cycle_free)


def cmd_test_bipartite(args: argparse.Namespace) -> int:
    return _cmd_property(args, "test-bipartite", test_bipartite)


def cmd_spanner(args: argparse.Namespace) -> int:
    g = load_graph(args.input)
    seed = args.seed[0]
    res = build_spanner(g, args.epsilon, args.delta, seed, args.alpha)
    h = res.as_graph(g.n)
    if args.out:
        save_graph(h, args.out)
    check = verify_partition(g, res.partition.state.part_of)
    st = stretch(g, res.edges)
    report = {
        "command": "spanner",
        **_graph_info(args.input, g),
        "epsilon": args.epsilon,
        "seed": seed,
        "out": args.out,
        "spanner_edges": h.m,
        "tree_edges": res.tree_edges,
        "cut_edges": res.cut_edges,
        "size_bound": (1 + args.epsilon) * g.n,
        "size_ok": h.m <= (1 + args.epsilon) * g.n,
        "stretch": st,
        "max_part_diameter": check.max_diameter,
        "stretch_bound": 2 * check.max_diameter + 1,
        "stretch_ok": st <= 2 * check.max_diameter + 1,
        "rounds": res.trace.rounds_used,
    }
    _emit(report, args)
    return 0


def _distance(value: int | AtLeast) -> dict:
    if isinstance(value, AtLeast):
        return {"at_least": value.value}
    return {"exact": value}


def cmd_verify(args: argparse.Namespace) -> int:
    g = load_graph(args.input)
    planar_ok, emb = is_planar(g)
    report: dict[str, Any] = {
        "command": "verify",
        **_graph_info(args.input, g),
        "connected": g.is_connected(),
        "planar": planar_ok,
        "bipartite": is_bipartite(g),
        "forest": is_forest(g),
        "girth": girth(g) if g.m else None,
        "distance_to_cycle_freeness": distance_to_cycle_freeness(g),
    }
    if emb is not None:
        report["faces"] = emb.face_count
    try:
        report["distance_to_planarity"] = _distance(distance_to_planarity(g, args.cap))
    except IntractableInstance as exc:
        report["distance_to_planarity"] = {"skipped": str(exc)}
    side = load_sidecar(args.input)
    if side is not None and side.get("property") == "planarity" and "exact" in report["distance_to_planarity"]:
        report["sidecar_matches"] = report["distance_to_planarity"]["exact"] == side["distance"]
    if args.partition:
        dump = json.loads(Path(args.partition).read_text())
        part_of: dict[int, int] = {}
        parent: dict[int, int | None] = {}
        for part in dump["parts"]:
            root = part["root"]
            for v in part["members"]:
                part_of[v] = root
            parent.update(_parents_from_tree(root, part["members"], part["tree_edges"]))
        if len(part_of) != g.n:
            raise UsageError("partition dump does not cover every node")
        report["partition"] = verify_partition(g, part_of, parent).to_dict()
    _emit(report, args)
    return 0


def _parents_from_tree(root: int, members: list[int], tree_edges: list[list[int]]) -> dict[int, int | None]:
    adj: dict[int, list[int]] = {v: [] for v in members}
    for a, b in tree_edges:
        adj[a].append(b)
        adj[b].append(a)
    parent: dict[int, int | None] = {root: None}
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    return parent


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="congest-planarity", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, seeds: bool = True) -> None:
        p.add_argument("--input", required=True, help="graph file: header 'n m' then one 'u v' per line")
        p.add_argument("--report", help="write the JSON report here instead of stdout")
        if seeds:
            p.add_argument("--seed", type=parse_seeds, default=[0], help="seed, range a..b, or comma list")
            p.add_argument("--csv", help="also write one CSV row per run")
            p.add_argument("--alpha", type=int, default=3, help="assumed arboricity bound")

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True, choices=["planar", "k5-chain", "triangle-chain", "cycle-bundle", "lower-bound"])
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--t", type=int, default=3, help="copies for the far families")
    g.add_argument("--cycle-length", type=int, default=4)
    g.add_argument("--k", type=int, default=5, help="excluded clique size for lower-bound instances")
    g.add_argument("--density-scale", type=float, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--report")
    g.set_defaults(func=cmd_gen)

    tp = sub.add_parser("test-planarity", help="run the planarity tester over seeds")
    common(tp)
    tp.add_argument("--epsilon", type=_unit_interval("epsilon"), required=True)
    tp.add_argument("--sample-constant", type=float, default=4.0)
    tp.add_argument("--forced-embedding", action="store_true")
    tp.add_argument("--gh-cost-constant", type=int, default=4)
    tp.add_argument("--max-rounds", type=int, default=None)
    tp.set_defaults(func=cmd_test_planarity)

    pa = sub.add_parser("partition", help="partition and verify against the oracle")
    common(pa)
    pa.add_argument("--epsilon", type=_unit_interval("epsilon"), required=True)
    pa.add_argument("--delta", type=_unit_interval("delta"), default=None, help="randomized variant when given")
    pa.add_argument("--cut-target", choices=["n", "m"], default="n")
    pa.add_argument("--dump", help="write the first run's partition dump here")
    pa.set_defaults(func=cmd_partition)

    for name, func, help_text in (
        ("test-cyclefree", cmd_test_cyclefree, "test cycle-freeness"),
        ("test-bipartite", cmd_test_bipartite, "test bipartiteness"),
    ):
        p = sub.add_parser(name, help=help_text)
        common(p)
        p.add_argument("--epsilon", type=_unit_interval("epsilon"), required=True)
        p.add_argument("--delta", type=_unit_interval("delta"), default=None)
        p.set_defaults(func=func)

    sp = sub.add_parser("spanner", help="build a sparse spanner")
    common(sp)
    sp.add_argument("--epsilon", type=_unit_interval("epsilon"), required=True)
    sp.add_argument("--delta", type=_unit_interval("delta"), default=None)
    sp.add_argument("--out", help="write the spanner edge list here")
    sp.set_defaults(func=cmd_spanner)

    ve = sub.add_parser("verify", help="oracle report for a graph, optionally with a partition dump")
    common(ve, seeds=False)
    ve.add_argument("--partition", help="partition dump written by 'partition --dump'")
    ve.add_argument("--cap", type=int, default=3, help="largest removal count searched for planarity distance")
    ve.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, GraphParseError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
