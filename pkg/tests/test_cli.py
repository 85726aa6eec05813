import json
import subprocess
import sys
from pathlib import Path

import pytest

from ptlab.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spec_invocations(capsys):
    code, out, _ = run(capsys, "theory", "equal", "beta-eta", r"\x y. x y", r"\x.x")
    assert code == 0 and out.splitlines()[0] == "yes"
    code, out, _ = run(capsys, "tree", "max", "([1 2]; ([2 1]; *, *), *)")
    assert (code, out) == (0, "([1]; ([2 1]; *, *))\n")
    code, out, _ = run(capsys, "term", "bt", "--depth", "2", r"(\x.x x)(\x.x x)")
    assert code == 2 and out.strip() == "?"


def test_exit_codes(capsys):
    assert run(capsys, "theory", "equal", "beta", ":One", ":I")[0] == 1
    assert run(capsys, "tree", "leq", "([1]; *)", "*")[0] == 0
    assert run(capsys, "tree", "leq", "*", "([1]; *)")[0] == 1
    assert run(capsys, "term", "normalize", ":Omega", "--fuel", "100")[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["tree", "product", "(["],
        ["tree", "star", "*", "*"],
        ["tree", "product", "*"],
        ["theory", "equal", "gamma", ":I", ":I"],
        ["term", "parse", r"\x. x)"],
        ["algebra", "subgroup", "([2 1]; *, *)"],
        ["algebra", "green", "Q", "*"],
        ["term", "bt", ":I", "--depth", "0"],
        ["rtree", "star", "/nonexistent.json"],
        ["theory", "equal", "hstar", r"\x y. y x", ":I"],
        [],
    ],
)
def test_errors_exit_at_least_three(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code >= 3
    assert err and not out


def test_tree_commands(capsys):
    cases = {
        ("product", "([2 1]; *, *)", "([2 1]; *, *)"): "([1 2]; *, *)",
        ("star", "([2 1]; *, ([2 1]; *, *))"): "([2 1]; ([2 1]; *, *), *)",
        ("max-prime", "([1 2]; ([2 1]; *, *), *)"): "([1]; ([2 1]; *, *))",
        ("meet", "([1]; *)", "([1 2]; *, *)"): "([1 2]; *, *)",
        ("norm", "([2 1]; *, *)"): "3",
        ("upset", "([1]; *)"): "*\n([1]; *)",
        ("to-term", "([2 1]; *, *)"): r"\x x1 x2. x x2 x1",
        ("parse", " ( [1] ; * ) "): "([1]; *)",
    }
    for args, expected in cases.items():
        code, out, _ = run(capsys, "tree", *args)
        assert (code, out.rstrip("\n")) == (0, expected), args
    assert run(capsys, "tree", "meet", "([2 1]; *, *)", "([1 2]; *, *)")[:2] == (1, "none\n")
    assert run(capsys, "tree", "covers", "([1 2]; *, *)", "([1]; *)")[0] == 0
    assert run(capsys, "tree", "leq-prime", "([1]; *)", "*")[0] == 0


def test_term_commands(capsys):
    assert run(capsys, "term", "normalize", "--mode", "beta-eta", ":One")[1] == "\\x. x\n"
    assert run(capsys, "term", "compose", r"\x y z. x z y", r"\x y z. x z y")[1] == "\\x y z. x y z\n"
    assert run(capsys, "term", "invert", r"\x y z. x z y")[1] == "\\x x1 x2. x x2 x1\n"
    assert run(capsys, "term", "invert", r"\x y. x")[0] == 1
    assert run(capsys, "term", "hnf", ":Y")[0] == 0
    assert run(capsys, "term", "parse", f"@{GOLDEN / 'terms.txt'}")[0] >= 3  # one term per file


def test_rtree_commands(capsys):
    j, j2 = str(GOLDEN / "j.json"), str(GOLDEN / "j2.json")
    assert run(capsys, "rtree", "equal", j, j2)[0] == 0
    assert run(capsys, "rtree", "unfold", j, "--depth", "2")[1] == "([1]; ([1]; cut))\n"
    assert json.loads(run(capsys, "rtree", "max", j)[1]) == {"root": "s0", "states": {"s0": {"perm": [], "children": []}}}
    assert json.loads(run(capsys, "rtree", "max", "--prime", j2)[1])["states"]["s0"]["children"] == ["s0"]
    assert run(capsys, "rtree", "leq", j, str(GOLDEN / "flipflop.json"))[0] == 1
    code, out, _ = run(capsys, "rtree", "product", j, j2)
    assert code == 0 and json.loads(out)["states"]["s0"]["perm"] == [1]
    assert run(capsys, "rtree", "to-term", j)[0] == 0


def test_theory_commands(capsys):
    j = "@" + str(GOLDEN / "j.json")
    assert run(capsys, "theory", "equal", "hstar", j, ":I")[0] == 0
    assert run(capsys, "theory", "equal", "hplus", j, ":I")[0] == 1
    assert run(capsys, "theory", "invertible", "hstar", ":J", "--fuel", "100000")[0] == 0
    code, out, _ = run(capsys, "theory", "inverse", "beta-eta", r"\x y z. x z y")
    assert (code, out) == (0, "\\x x1 x2. x x2 x1\n")
    assert run(capsys, "theory", "inverse", "beta", ":One")[0] == 1


def test_algebra_commands(capsys):
    assert run(capsys, "algebra", "green", "L", "([2 1]; *, *)")[1] == "([1 2]; *, *)\n([2 1]; *, *)\n"
    assert run(capsys, "algebra", "subgroup", "*")[1] == "*\n"
    assert run(capsys, "algebra", "sigma", "([1]; *)", "*")[0] == 0
    assert run(capsys, "algebra", "sigma", "([2 1]; *, *)", "*")[0] == 1


def test_json_format(capsys):
    code, out, _ = run(capsys, "theory", "equal", "beta", ":One", ":I", "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["result"] == "no" and doc["exit"] == 1 and "nf" in doc["evidence"]
    doc = json.loads(run(capsys, "tree", "upset", "([1]; *)", "--format", "json")[1])
    assert doc["items"] == ["*", "([1]; *)"]


def test_oracle_run(capsys):
    code, out, _ = run(capsys, "oracle", "run", "--max-nodes", "3", "--no-rational")
    assert code == 0 and "all laws pass" in out and "seed 0" in out
    code, out, _ = run(capsys, "oracle", "run", "--max-nodes", "2", "--sample", "10", "--format", "json", "--jobs", "2")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["seed"] == 0


def test_render(capsys):
    code, out, _ = run(capsys, "render", "--dot", "([2 1]; *, *)")
    assert code == 0 and out.startswith("digraph") and 'label="[2 1]"' in out
    out = run(capsys, "render", "--dot", "@" + str(GOLDEN / "j.json"))[1]
    assert "s0 -> s0" in out
    out = run(capsys, "render", "--dot", ":J", "--depth", "2")[1]
    assert "cut" in out


def test_golden_round_trips(capsys):
    for line in (GOLDEN / "trees.txt").read_text().splitlines():
        assert run(capsys, "tree", "parse", line)[1] == line + "\n"
    for line in (GOLDEN / "terms.txt").read_text().splitlines():
        assert run(capsys, "term", "parse", line)[1] == line + "\n"


def test_determinism(capsys):
    argv = ["oracle", "run", "--max-nodes", "2", "--sample", "20", "--format", "json"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ptlab", "tree", "star", "([2 1]; *, *)"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "([2 1]; *, *)\n"
