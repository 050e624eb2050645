import json
from pathlib import Path

import pytest

from acpkit.cli import EXIT_NO, EXIT_OK, EXIT_UNGUARDED, EXIT_USAGE, EXIT_VARIANT, main

SPECS = Path(__file__).resolve().parents[1] / "demos" / "specs"
BASIC = str(SPECS / "basic.acp")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_normalize(capsys):
    assert run_json(capsys, "normalize", BASIC, "dead") == (EXIT_OK, "delta")
    assert run_json(capsys, "normalize", BASIC, "unit") == (EXIT_OK, "a")
    assert run(capsys, "normalize", BASIC, "missing")[0] == EXIT_USAGE
    assert run(capsys, "normalize", "/nonexistent.acp", "x")[0] == EXIT_USAGE


def test_lts(capsys):
    code, out = run_json(capsys, "lts", BASIC, "looping")
    assert code == EXIT_OK and out["states"] == [0] and out["exhausted"] is False
    assert out["trans"] == [{"from": 0, "cond": "true", "act": "a", "to": 0}]
    code, dot = run(capsys, "lts", BASIC, "comm", "--dot")
    assert code == EXIT_OK and dot.startswith("digraph")
    assert run(capsys, "lts", BASIC, "unguarded")[0] == EXIT_UNGUARDED
    code, out = run_json(capsys, "lts", BASIC, "comm", "--max-states", "2")
    assert out["exhausted"] is True


def test_bisim(capsys):
    code, out = run_json(capsys, "bisim", BASIC, "split", BASIC, "single")
    assert code == EXIT_OK and out["related"] and out["kind"] == "plain"
    code, out = run_json(capsys, "bisim", BASIC, "late", BASIC, "early")
    assert code == EXIT_NO and "obligation" in out
    retro = SPECS / "retro.acp"
    code, out = run_json(capsys, "bisim", retro, "lhs", retro, "rhs")
    assert code == EXIT_OK and out["kind"] == "retro"
    la = SPECS / "lastaction.acp"
    code, out = run_json(capsys, "bisim", la, "two", la, "merged")
    assert code == EXIT_OK and out["mode"] == "last_action"
    sig = SPECS / "signals.acp"
    assert run(capsys, "bisim", sig, "emitted", sig, "plain")[0] == EXIT_OK
    assert run(capsys, "bisim", sig, "plain", sig, "bare")[0] == EXIT_NO


def test_bisim_variant_errors(capsys):
    assert run(capsys, "bisim", BASIC, "single", SPECS / "retro.acp", "lhs")[0] == EXIT_VARIANT
    assert run(capsys, "bisim", BASIC, "single", BASIC, "split", "--kind", "retro")[0] == EXIT_VARIANT


def test_eval(capsys):
    assert run_json(capsys, "eval", BASIC, "choice", "--assign", "p=1") == (EXIT_OK, "a")
    assert run_json(capsys, "eval", BASIC, "choice", "--assign", "p=0", "--via-endo") == (EXIT_OK, "b")
    assert run_json(capsys, "eval", BASIC, "gce", "--endo", "g") == (EXIT_OK, "a . (p -> b)")
    assert run_json(capsys, "eval", BASIC, "gce", "--endo", "g", "--generalized") == (EXIT_OK, "a . b")
    assert run(capsys, "eval", BASIC, "choice")[0] == EXIT_USAGE
    assert run(capsys, "eval", BASIC, "choice", "--assign", "p=2")[0] == EXIT_USAGE
    assert run(capsys, "eval", BASIC, "choice", "--assign", "")[0] == EXIT_USAGE
    assert run(capsys, "eval", BASIC, "choice", "--endo", "nope")[0] == EXIT_USAGE


def test_check_axioms(capsys, monkeypatch):
    code, out = run_json(capsys, "check-axioms", "--variant", "acpec", "--n", "5", "--only", "A1,GC2")
    assert code == EXIT_OK and [a["axiom"] for a in out["axioms"]] == ["A1", "GC2"]
    code, out = run_json(capsys, "check-axioms", "--n", "10", "--only", "A1", "--inject-broken")
    assert code == EXIT_NO and out["axioms"][-1]["axiom"] == "BROKEN"
    monkeypatch.setenv("ACPKIT_SEED", "17")
    code, out = run_json(capsys, "check-axioms", "--n", "1", "--only", "A1")
    assert out["seed"] == 17
    monkeypatch.setenv("ACPKIT_SEED", "x")
    assert run(capsys, "check-axioms", "--n", "1")[0] == EXIT_USAGE


def test_service_demo(capsys):
    code, out = run_json(capsys, "service-demo")
    assert code == EXIT_OK and len(out["states"]) == 21 and out["reply"]["m1.m2"] == "B"
    code, out = run_json(capsys, "service-demo", "--reply", "m1=T,m2=T,m1.m1=T,m1.m2=T,m2.m1=T,m2.m2=T")
    assert code == EXIT_OK and len(out["states"]) < 21


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["bisim", BASIC]])
def test_usage_errors(capsys, argv):
    assert main(argv) == EXIT_USAGE
