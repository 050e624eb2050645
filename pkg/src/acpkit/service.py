"""The request/reply service driven by a reply function, as a guarded recursive specification.

A reply function maps non-empty command sequences to T, F or B (blocked).
Here it is given on sequences of length one and two; longer sequences
answer as their two-element prefix, which keeps the set of derived reply
functions finite.
"""
from __future__ import annotations

from itertools import product
from typing import Mapping

from .conditions import atom, just_name, retro
from .errors import DeclarationError
from .terms import Action, AlgebraConfig, Alt, Guard, RecConst, RecSpec, Seq, Term, Var, alt

REPLIES = ("T", "F", "B")


class ReplyFunction:
    """Reply function determined by its values on sequences of length 1 and 2."""

    def __init__(self, commands, table: Mapping[tuple, str]):
        self.commands = tuple(commands)
        keys = [(m,) for m in self.commands] + list(product(self.commands, repeat=2))
        missing = [k for k in keys if k not in table]
        if missing:
            raise DeclarationError(f"reply function undefined on {missing[0]}")
        bad = [v for v in table.values() if v not in REPLIES]
        if bad:
            raise DeclarationError(f"reply value {bad[0]!r} is not one of {REPLIES}")
        self.table = {k: table[k] for k in keys}
        for m in self.commands:
            if self.table[(m,)] == "B" and any(self.table[(m, n)] != "B" for n in self.commands):
                raise DeclarationError(f"blocked after <{m}> but not after every extension")

    def __call__(self, seq: tuple) -> str:
        return self.table[tuple(seq[:2])]

    def derive(self, m: str) -> "ReplyFunction":
        return ReplyFunction(self.commands, {k: self((m,) + k) for k in self.table})

    def key(self) -> tuple:
        return tuple(sorted(self.table.items()))

    def __eq__(self, other):
        return isinstance(other, ReplyFunction) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @staticmethod
    def parse(commands, text: str) -> "ReplyFunction":
        """Entries like 'm1=T, m1m2=B' or 'm1.m2=B' separated by commas."""
        table = {}
        for part in text.split(","):
            if not part.strip():
                continue
            k, _, v = part.partition("=")
            table[tuple(x for x in k.strip().split(".") if x)] = v.strip()
        return ReplyFunction(commands, table)


def recv(m: str) -> str:
    return f"r_{m}"


def query(m: str) -> str:
    return f"rq_{m}"


def send(v: str) -> str:
    return f"s_{v}"


def service_config(commands) -> AlgebraConfig:
    actions = [recv(m) for m in commands] + [query(m) for m in commands] + [send(v) for v in REPLIES]
    return AlgebraConfig(frozenset(), frozenset(actions), {}, "acpecr_lastaction")


def reachable(G: ReplyFunction) -> list[ReplyFunction]:
    seen, order = {G}, [G]
    for F in order:
        for m in G.commands:
            F2 = F.derive(m)
            if F2 not in seen:
                seen.add(F2)
                order.append(F2)
    return order


def service_spec(G: ReplyFunction, name: str = "service") -> tuple[RecSpec, str]:
    """One equation per reachable reply function; returns the spec and G's variable."""
    funcs = reachable(G)
    var = {F: f"P{i}" for i, F in enumerate(funcs)}
    eqs = {}
    for F in funcs:
        summands = []
        for m in G.commands:
            # proceed as the derived function only if the request was to process m and it was accepted
            accepted = retro(atom(just_name(recv(m)))) & ~atom(just_name(send("B")))
            cont = Alt(Guard(accepted, Var(var[F.derive(m)])), Guard(~accepted, Var(var[F])))
            summands.append(Seq(Alt(Action(recv(m)), Action(query(m))), Seq(Action(send(F((m,)))), cont)))
        eqs[var[F]] = alt(*summands)
    return RecSpec.make(name, eqs), var[G]


def service_process(G: ReplyFunction) -> Term:
    spec, x = service_spec(G)
    return RecConst(x, spec)


def default_reply(commands=("m1", "m2")) -> ReplyFunction:
    m1, m2 = commands
    return ReplyFunction(commands, {
        (m1,): "T", (m2,): "F",
        (m1, m1): "F", (m1, m2): "B",
        (m2, m1): "T", (m2, m2): "T",
    })
