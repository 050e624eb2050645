"""The request/reply service for two commands, as a guarded recursive specification."""
from acpkit import cts_of, format_term, retro_split_bisim
from acpkit.service import default_reply, reachable, service_config, service_spec
from acpkit.terms import RecConst

G = default_reply()
print("reply function:", {".".join(k): v for k, v in G.table.items()})
print("derived reply functions:", len(reachable(G)))
spec, x = service_spec(G)
for v, t in spec.equations:
    print(f"  {v} = {format_term(t)}")
cfg = service_config(G.commands)
T = cts_of(RecConst(x, spec), cfg)
print(f"states {len(T.states)}, moves {len(T.trans)}")
print("solves its equation:", retro_split_bisim(T, cts_of(spec.body(x), cfg), "last_action").related)
