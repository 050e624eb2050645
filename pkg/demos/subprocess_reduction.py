"""Last-action conditions let a choice between two prefixed processes share one continuation."""
from acpkit import cts_of, eq_axiomatic, format_term, load_spec, parse_proc, retro_split_bisim
from acpkit.terms import count_subprocesses

cfg = load_spec("variant: acpecr_lastaction\nactions: a, b, a1, a2, b1, b2, a1x, a2x, b1x, b2x\n")
lhs = parse_proc("a . (a1 . a1x + a2 . a2x) + b . (b1 . b1x + b2 . b2x)", cfg)
rhs = parse_proc(
    "(a + b) . (just(a) -> (a1 + a2) . (just(a1) -> a1x + just(a2) -> a2x)"
    " + just(b) -> (b1 + b2) . (just(b1) -> b1x + just(b2) -> b2x))", cfg)
print("before:", format_term(lhs), f"({count_subprocesses(lhs)} subprocesses)")
print("after: ", format_term(rhs), f"({count_subprocesses(rhs)} subprocesses)")
print("axiomatic:", eq_axiomatic(lhs, rhs, cfg))
print("bisimilar:", retro_split_bisim(cts_of(lhs, cfg), cts_of(rhs, cfg), "last_action").related)
