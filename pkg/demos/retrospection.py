"""Retrospection: a guard may look back at the condition of the previous step."""
from pathlib import Path

from acpkit import cts_of, eq_axiomatic, format_term, load_spec, normalize, retro_split_bisim, split_bisim

specs = Path(__file__).parent / "specs"
cfg = load_spec((specs / "retro.acp").read_text())
lhs, rhs = cfg.procs["lhs"], cfg.procs["rhs"]
print(format_term(lhs), " = ", format_term(rhs))
print("normal form:", format_term(normalize(lhs, cfg)))
print("axiomatic:", eq_axiomatic(lhs, rhs, cfg))
T1, T2 = cts_of(lhs, cfg), cts_of(rhs, cfg)
print("retrospective bisimilar:", retro_split_bisim(T1, T2).related)
print("plain splitting bisimilar:", split_bisim(T1, T2).related)

la = load_spec((specs / "lastaction.acp").read_text())
two, merged = la.procs["two"], la.procs["merged"]
print()
print(format_term(two), " = ", format_term(merged))
print("axiomatic:", eq_axiomatic(two, merged, la))
print("bisimilar (last action):", retro_split_bisim(cts_of(two, la), cts_of(merged, la), "last_action").related)
