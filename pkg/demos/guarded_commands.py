"""Guarded commands, splitting bisimilarity and condition evaluation on a small spec."""
from pathlib import Path

from acpkit import cts_of, format_term, load_spec, normalize, split_bisim
from acpkit.terms import CondEval
from acpkit.conditions import assignment_endo

cfg = load_spec((Path(__file__).parent / "specs" / "basic.acp").read_text())

split, single = cfg.procs["split"], cfg.procs["single"]
print("split  :", format_term(split))
print("single :", format_term(single))
print("bisimilar:", split_bisim(cts_of(split, cfg), cts_of(single, cfg)).related)

late, early = cfg.procs["late"], cfg.procs["early"]
v = split_bisim(cts_of(late, cfg), cts_of(early, cfg))
print(f"{format_term(late)}  vs  {format_term(early)}: related={v.related}, obligation={v.obligation}")

choice = cfg.procs["choice"]
for p in (True, False):
    t = normalize(CondEval(assignment_endo({"p": p, "q": False}), choice), cfg)
    print(f"{format_term(choice)} with p={int(p)}:", format_term(t))
