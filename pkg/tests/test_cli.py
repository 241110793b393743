from __future__ import annotations

import argparse
import csv
import json
import subprocess
import sys

import pytest

from congest_planarity.cli import main, parse_seeds
from congest_planarity.graph import load_graph


def run_cli(capsys, *argv: str) -> tuple[int, dict | None]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestSeeds:
    def test_forms(self):
        assert parse_seeds("7") == [7]
        assert parse_seeds("1..4") == [1, 2, 3, 4]
        assert parse_seeds("3,1,2") == [3, 1, 2]

    @pytest.mark.parametrize("bad", ["", "a", "5..2", "1..x"])
    def test_invalid(self, bad):
        with pytest.raises((ValueError, argparse.ArgumentTypeError)):
            parse_seeds(bad)


class TestCommands:
    def test_gen_planar_and_test(self, tmp_path, capsys):
        out = tmp_path / "p.txt"
        code, rep = run_cli(capsys, "gen", "--family", "planar", "--n", "40", "--seed", "2", "--out", str(out))
        assert code == 0 and rep["n"] == 40
        code, rep = run_cli(capsys, "test-planarity", "--input", str(out), "--epsilon", "0.25", "--seed", "1..3")
        assert code == 0
        assert rep["runs"] == 3 and rep["reject_rate"] == 0.0
        assert {r["verdict"] for r in rep["results"]} == {"accept"}

    def test_far_family_sidecar_and_reject_rate(self, tmp_path, capsys):
        out = tmp_path / "k5.txt"
        code, rep = run_cli(capsys, "gen", "--family", "k5-chain", "--t", "8", "--out", str(out))
        assert code == 0 and rep["distance"] == 8
        args = ["test-planarity", "--input", str(out), "--epsilon", "0.09", "--seed", "1..5", "--forced-embedding"]
        code, rep = run_cli(capsys, *args)
        assert code == 0
        assert rep["known"]["distance"] == 8
        assert "reject_rate" in rep and rep["reject_rate"] >= 0.6

    def test_report_and_csv(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        run_cli(capsys, "gen", "--family", "planar", "--n", "30", "--out", str(g))
        report, table = tmp_path / "r.json", tmp_path / "r.csv"
        code, rep = run_cli(
            capsys, "test-planarity", "--input", str(g), "--epsilon", "0.5", "--seed", "0,1",
            "--report", str(report), "--csv", str(table),
        )
        assert code == 0 and rep is None
        assert json.loads(report.read_text())["runs"] == 2
        with open(table) as fh:
            rows = list(csv.DictReader(fh))
        assert [r["seed"] for r in rows] == ["0", "1"]

    def test_partition_dump_and_verify(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        run_cli(capsys, "gen", "--family", "planar", "--n", "60", "--density", "0.7", "--out", str(g))
        dump = tmp_path / "d.json"
        code, rep = run_cli(capsys, "partition", "--input", str(g), "--epsilon", "0.3", "--dump", str(dump))
        assert code == 0 and rep["within_bound_rate"] == 1.0
        code, rep = run_cli(capsys, "verify", "--input", str(g), "--partition", str(dump))
        assert code == 0 and rep["planar"]
        assert rep["partition"]["all_trees_valid"] and rep["partition"]["all_connected"]
        assert rep["partition"]["cut_edges"] == json.loads(dump.read_text())["cut_edges"]

    def test_randomized_partition(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        run_cli(capsys, "gen", "--family", "planar", "--n", "80", "--out", str(g))
        code, rep = run_cli(capsys, "partition", "--input", str(g), "--epsilon", "0.3", "--delta", "0.1", "--seed", "0..1")
        assert code == 0 and len(rep["results"]) == 2

    def test_property_testers(self, tmp_path, capsys):
        tri = tmp_path / "tri.txt"
        run_cli(capsys, "gen", "--family", "triangle-chain", "--t", "20", "--out", str(tri))
        code, rep = run_cli(capsys, "test-bipartite", "--input", str(tri), "--epsilon", "0.2")
        assert code == 0 and rep["reject_rate"] == 1.0
        bundle = tmp_path / "cb.txt"
        run_cli(capsys, "gen", "--family", "cycle-bundle", "--t", "10", "--cycle-length", "6", "--out", str(bundle))
        code, rep = run_cli(capsys, "test-cyclefree", "--input", str(bundle), "--epsilon", "0.1")
        assert code == 0 and rep["reject_rate"] == 1.0

    def test_spanner(self, tmp_path, capsys):
        g, h = tmp_path / "g.txt", tmp_path / "h.txt"
        run_cli(capsys, "gen", "--family", "planar", "--n", "70", "--density", "0.9", "--out", str(g))
        code, rep = run_cli(capsys, "spanner", "--input", str(g), "--epsilon", "0.25", "--out", str(h))
        assert code == 0 and rep["size_ok"] and rep["stretch_ok"]
        assert load_graph(h).m == rep["spanner_edges"]

    def test_lower_bound_gen(self, tmp_path, capsys):
        out = tmp_path / "lb.txt"
        code, rep = run_cli(capsys, "gen", "--family", "lower-bound", "--n", "200", "--k", "5", "--out", str(out))
        assert code == 0 and rep["girth"] >= 2

    def test_verify_sidecar_match(self, tmp_path, capsys):
        out = tmp_path / "k5.txt"
        run_cli(capsys, "gen", "--family", "k5-chain", "--t", "1", "--out", str(out))
        code, rep = run_cli(capsys, "verify", "--input", str(out))
        assert code == 0 and rep["sidecar_matches"] is True
        assert rep["distance_to_planarity"] == {"exact": 1}


class TestErrors:
    def test_missing_file(self, tmp_path, capsys):
        code = main(["test-planarity", "--input", str(tmp_path / "none.txt"), "--epsilon", "0.5"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_malformed_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("3 1\n0 7\n")
        assert main(["verify", "--input", str(bad)]) == 1

    def test_epsilon_out_of_range(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["test-planarity", "--input", "x", "--epsilon", "1.5"])
        assert exc.value.code == 2

    def test_console_script_entry(self, tmp_path):
        out = tmp_path / "p.txt"
        proc = subprocess.run(
            [sys.executable, "-m", "congest_planarity.cli", "gen", "--family", "planar", "--n", "12", "--out", str(out)],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0, proc.stderr
        assert json.loads(proc.stdout)["n"] == 12
