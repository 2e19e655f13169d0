from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from mpturan.cli import build_parser, run
from mpturan.core import MultipartiteGraph, VertexPartition


def call(*argv) -> tuple[int, list[dict]]:
    out = io.StringIO()
    code = run(list(argv), out)
    lines = out.getvalue().splitlines()
    assert lines and out.getvalue().endswith("\n")
    return code, [json.loads(line) for line in lines]


def test_f_command():
    code, (obj,) = call("f", "--sizes", "3,2,2", "--t", "3")
    assert code == 0 and obj["value"] == 12 and obj["argmax"] == [[[0], [1, 2]]]
    code, (obj,) = call("f", "--sizes", "2,3,2", "--t", "3")
    assert obj["instance"]["sizes"] == [3, 2, 2]


def test_g_command():
    code, (obj,) = call("g", "--sizes", "3,2,2", "--t", "3", "--k", "2")
    assert code == 0 and obj["value"] == 14
    assert obj["witness"]["dominators"] == [1]
    code, (direct,) = call("g", "--sizes", "3,2,2", "--t", "3", "--k", "2", "--mode", "direct")
    assert direct["value"] == 14


@pytest.mark.parametrize(
    "argv, error",
    [
        (["f", "--sizes", "3,2", "--t", "3"], "TooFewClasses"),
        (["f", "--sizes", "3,0,2", "--t", "3"], "NonPositiveSize"),
        (["f", "--sizes", "3,2,2", "--t", "2"], "TooFewClasses"),
        (["f", "--t", "3"], "UsageError"),
        (["f", "--sizes", "a,b", "--t", "3"], "UsageError"),
        (["g", "--sizes", "1,1,1", "--t", "3", "--k", "9"], "InfeasibleDominators"),
        (["recover", "--graph", "/nonexistent.json", "--t", "3"], "InvalidInput"),
        (["perturb", "--graph", "/nonexistent.json", "--delete", "1"], "UsageError"),
        (["bogus"], "UsageError"),
    ],
)
def test_validation_errors_exit_2(argv, error):
    code, (obj,) = call(*argv)
    assert code == 2 and obj["error"] == error and obj["message"]


def test_tau_command():
    code, (obj,) = call("tau", "--sizes", "100,1,1,1", "--t", "3", "--L", "2")
    assert obj["value"] == 1 and obj["families"] == [[0], [1, 2, 3]]


def test_partition_commands(tmp_path):
    split = VertexPartition.from_blocks((3, 2, 2), [[(0, 0), (0, 1), (0, 2), (2, 0)], [(1, 0), (1, 1), (2, 1)]])
    path = tmp_path / "p.json"
    path.write_text(json.dumps(split.to_json()))
    code, (obj,) = call("check-stable", "--partition", str(path))
    assert obj["verdict"]["violated_condition"] == "EqualPartialIntegralParts" and obj["min_eps"] == 1
    code, (obj,) = call("check-stable", "--partition", str(path), "--eps", "1")
    assert obj["verdict"]["holds"]
    code, (obj,) = call("internalize", "--partition", str(path))
    assert obj["edges"] == 12
    code, (obj,) = call("stabilize", "--partition", str(path), "--eps", "1", "--no-size-check")
    assert code == 0 and obj["removed"] == [[0, 2]]
    code, (obj,) = call("stabilize", "--partition", str(path), "--eps", "1")
    assert code == 2 and obj["error"] == "PreconditionViolated"
    cls = tmp_path / "c.json"
    cls.write_text(json.dumps({"sizes": [3, 2, 2], "class_blocks": [[0], [1, 2]]}))
    code, (obj,) = call("check-stable", "--partition", str(cls))
    assert obj["verdict"]["holds"]
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, (obj,) = call("internalize", "--partition", str(bad))
    assert code == 2 and obj["error"] == "InvalidInput"


def test_exhaustive_commands():
    code, (obj,) = call("extremal-partitions", "--sizes", "3,2,2", "--t", "3")
    assert obj["f"] == 12 and obj["count"] == 1
    code, (obj,) = call("verify-thm12", "--sizes", "2,2,2", "--t", "3")
    assert obj["match"] and obj["counterexamples"] == []


def test_oracle_and_certify():
    code, (obj,) = call("oracle-ex", "--sizes", "2,2,2", "--t", "3", "--k", "2")
    assert obj["value"] == 10 and obj["exhaustive"]
    code, (obj,) = call("oracle-ex", "--sizes", "3,3,3,3", "--t", "3")
    assert code == 2 and obj["error"] == "BudgetExceeded"
    code, (obj,) = call("oracle-ex", "--sizes", "3,3,3,3", "--t", "3", "--budget-edges", "60")
    assert obj["value"] == 36
    code, records = call("certify", "--r", "3", "--max-entry", "2", "--t", "3")
    assert code == 0 and len(records) == 4 and all(r["relation"] == "equal" for r in records)


def test_realize_perturb_recover_pipeline(tmp_path):
    code, (obj,) = call("realize", "--sizes", "12,8,8", "--t", "3")
    g = MultipartiteGraph.from_json(obj["graph"])
    assert g.num_edges == obj["value"] == 192
    graph_path = tmp_path / "g.json"
    graph_path.write_text(json.dumps(obj["graph"]))
    code, (pert,) = call("perturb", "--graph", str(graph_path), "--delete", "5", "--seed", "3")
    assert MultipartiteGraph.from_json(pert["graph"]).num_edges == 187
    code, (again,) = call("perturb", "--graph", str(graph_path), "--delete", "5", "--seed", "3")
    assert again == pert
    pert_path = tmp_path / "h.json"
    pert_path.write_text(json.dumps(pert["graph"]))
    code, (rec,) = call("recover", "--graph", str(pert_path), "--t", "3")
    assert code == 0 and rec["success"] and rec["epsilon"] < 1
    # the wrapped perturb output is accepted as a graph file as well
    pert_path.write_text(json.dumps(pert))
    assert call("recover", "--graph", str(pert_path), "--t", "3")[1][0] == rec
    code, (err,) = call("perturb", "--graph", str(graph_path), "--delete", "1000", "--seed", "3")
    assert code == 2 and err["error"] == "CountTooLarge"


def test_jobs_does_not_change_output():
    a = call("oracle-ex", "--sizes", "2,2,2,1", "--t", "3")[1][0]
    b = call("oracle-ex", "--sizes", "2,2,2,1", "--t", "3", "--jobs", "2")[1][0]
    assert a["value"] == b["value"] and a["witness"] == b["witness"]


def test_pretty_output():
    out = io.StringIO()
    assert run(["--pretty", "f", "--sizes", "2,2,2", "--t", "3"], out) == 0
    assert "\n  " in out.getvalue()
    assert json.loads(out.getvalue())["value"] == 8


def test_help_lists_acceptance_flags():
    parser = build_parser()
    text = parser.format_help()
    for name in ["f", "g", "tau", "extremal-partitions", "verify-thm12", "check-stable", "internalize",
                 "stabilize", "recover", "oracle-ex", "certify", "realize", "perturb"]:
        assert name in text
    sub = {a.dest: a for a in parser._actions}["command"].choices
    flags = " ".join(sub[c].format_help() for c in sub)
    for flag in ["--sizes", "--t", "--k", "--L", "--graph", "--partition", "--eps", "--xi", "--seed",
                 "--jobs", "--budget-edges"]:
        assert flag in flags
    assert "--json" in text and "--pretty" in text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mpturan", "f", "--sizes", "3,2,2", "--t", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == 12
    proc = subprocess.run([sys.executable, "-m", "mpturan", "f", "--sizes", "3,2", "--t", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and json.loads(proc.stdout)["error"] == "TooFewClasses"


def test_unexpected_failure_exits_1(monkeypatch):
    import mpturan.calculus as calculus

    def boom(*_a, **_k):
        raise RuntimeError("boom")

    monkeypatch.setattr(calculus, "compute_f", boom)
    code, [obj] = call("f", "--sizes", "3,2,2", "--t", "3")
    assert code == 1 and obj["error"] == "InternalError" and "boom" in obj["message"]
