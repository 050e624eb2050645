"""Random closed terms, conditions and transition systems for the property suites."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .conditions import BOT, TOP, Cond, atom, just_name
from .cts import Cts, make_cts
from .terms import (
    DELTA,
    DELTA_NAME,
    EPS,
    NEX,
    Action,
    AlgebraConfig,
    Alt,
    CommMerge,
    Emit,
    Encap,
    Guard,
    LeftMerge,
    Par,
    Seq,
    Term,
)


def atom_names(cfg: AlgebraConfig, limit: int = 3) -> list[str]:
    return sorted(cfg.atoms)[:limit]


def action_names(cfg: AlgebraConfig, limit: int = 4) -> list[str]:
    return sorted(cfg.actions)[:limit]


def random_cond(rng: random.Random, atoms: list[str], depth: int = 2, retro_depth: int = 0) -> Cond:
    if not atoms:
        return rng.choice([TOP, TOP, BOT])
    if depth <= 0 or rng.random() < 0.35:
        r = rng.random()
        if r < 0.08:
            return TOP
        if r < 0.12:
            return BOT
        d = rng.randint(0, retro_depth) if retro_depth else 0
        return atom(rng.choice(atoms), d)
    k = rng.random()
    if k < 0.25:
        return ~random_cond(rng, atoms, depth - 1, retro_depth)
    x = random_cond(rng, atoms, depth - 1, retro_depth)
    y = random_cond(rng, atoms, depth - 1, retro_depth)
    return x & y if k < 0.6 else x | y


@dataclass
class TermGen:
    """Random closed terms over a configuration.

    Merges are drawn with low weight: they multiply state counts, and the suites
    must stay fast.
    """

    cfg: AlgebraConfig
    rng: random.Random
    depth: int = 4
    atoms: list | None = None
    actions: list | None = None
    retro_depth: int = 0
    merges: bool = True
    signals: bool | None = None

    def __post_init__(self):
        if self.atoms is None:
            self.atoms = atom_names(self.cfg)
        if self.actions is None:
            self.actions = action_names(self.cfg)
        if self.signals is None:
            self.signals = self.cfg.signals
        if self.cfg.retro and not self.retro_depth:
            self.retro_depth = 1

    def cond(self, depth: int = 2) -> Cond:
        return random_cond(self.rng, self.atoms, depth, self.retro_depth)

    def action(self, with_delta: bool = False) -> str:
        if with_delta and self.rng.random() < 0.15:
            return DELTA_NAME
        return self.rng.choice(self.actions)

    def leaf(self) -> Term:
        r = self.rng.random()
        if r < 0.65:
            return Action(self.action())
        if r < 0.82:
            return EPS
        if self.signals and r < 0.86:
            return NEX
        return DELTA

    def term(self, depth: int | None = None) -> Term:
        d = self.depth if depth is None else depth
        if d <= 0 or self.rng.random() < 0.2:
            return self.leaf()
        ops = [("alt", 5), ("seq", 6), ("guard", 3), ("encap", 1)]
        if self.merges:
            ops += [("par", 1), ("leftm", 1), ("comm", 1)]
        if self.signals:
            ops += [("emit", 2)]
        tag = self.rng.choices([o for o, _ in ops], [w for _, w in ops])[0]
        # merges get shallow operands to keep the state spaces small
        sub = d - 1 if tag not in ("par", "leftm", "comm") else min(d - 1, 1)
        if tag == "alt":
            return Alt(self.term(sub), self.term(sub))
        if tag == "seq":
            return Seq(self.term(sub), self.term(sub))
        if tag == "guard":
            return Guard(self.cond(), self.term(sub))
        if tag == "emit":
            return Emit(self.cond(), self.term(sub))
        if tag == "encap":
            return Encap(frozenset(self.rng.sample(self.actions, self.rng.randint(0, min(2, len(self.actions))))),
                         self.term(sub))
        ctor = {"par": Par, "leftm": LeftMerge, "comm": CommMerge}[tag]
        return ctor(self.term(sub), self.term(sub))

    def subset(self) -> frozenset:
        return frozenset(a for a in self.actions if self.rng.random() < 0.4)


def default_config(variant: str = "acpec", atoms=("p", "q", "r"), actions=("a", "b", "c", "d")) -> AlgebraConfig:
    """Small configuration with one communication a|b = c."""
    gamma = {("a", "b"): "c", ("b", "a"): "c"}
    if variant == "acpecr_lastaction":
        return AlgebraConfig(frozenset(just_name(a) for a in actions), frozenset(actions), gamma, variant)
    return AlgebraConfig(frozenset(atoms), frozenset(actions), gamma, variant)


# ---------------------------------------------------------------- systems

def random_cts(rng: random.Random, n_states: int, atoms: list[str], actions: list[str],
               signals: bool = False, retro_depth: int = 0, density: float = 0.35) -> Cts:
    states = list(range(n_states))
    trans, term = [], []
    for s in states:
        for t in states:
            for a in actions:
                if rng.random() < density / max(1, len(actions) - 1):
                    trans.append((s, random_cond(rng, atoms, 1, retro_depth), a, t))
        if rng.random() < 0.4:
            term.append((s, random_cond(rng, atoms, 1, retro_depth)))
    sgn = None
    if signals:
        sgn = {s: (TOP if rng.random() < 0.6 else random_cond(rng, atoms, 1) | atom(atoms[0])) for s in states}
    T = make_cts(0, trans, term, sgn, retro=retro_depth > 0, variant="acpecs" if signals else "acpec")
    T.states = states
    return T


def bisimilar_variant(T: Cts, rng: random.Random, atoms: list[str], steps: int = 2) -> Cts:
    """A system bisimilar to T: states renamed, labels split on an atom, states duplicated."""
    for _ in range(steps):
        k = rng.random()
        if k < 0.4 and T.trans:
            T = _split_label(T, rng, atoms)
        elif k < 0.8:
            T = _duplicate_state(T, rng)
        else:
            T = _rename(T, rng)
    return T


def _rename(T: Cts, rng: random.Random) -> Cts:
    perm = list(range(len(T.states)))
    rng.shuffle(perm)
    m = {s: ("r", perm[i]) for i, s in enumerate(T.states)}
    return Cts([m[s] for s in T.states], m[T.init], [(m[a], c, x, m[b]) for a, c, x, b in T.trans],
               [(m[s], c) for s, c in T.term], None if T.sgn is None else {m[s]: v for s, v in T.sgn.items()},
               T.retro, T.variant)


def _split_label(T: Cts, rng: random.Random, atoms: list[str]) -> Cts:
    i = rng.randrange(len(T.trans))
    a, c, x, b = T.trans[i]
    p = atom(rng.choice(atoms)) if atoms else TOP
    trans = T.trans[:i] + [(a, c & p, x, b), (a, c & ~p, x, b)] + T.trans[i + 1:]
    trans = [t for t in trans if not t[1].is_bot]
    return Cts(list(T.states), T.init, trans, list(T.term), None if T.sgn is None else dict(T.sgn),
               T.retro, T.variant)


def _duplicate_state(T: Cts, rng: random.Random) -> Cts:
    s = rng.choice(T.states)
    twin = ("dup", s, len(T.states))
    trans = list(T.trans) + [(twin, c, x, b) for a, c, x, b in T.trans if a == s]
    # redirect some of the moves into s to the twin
    trans = [(a, c, x, twin if b == s and rng.random() < 0.5 else b) for a, c, x, b in trans]
    term = list(T.term) + [(twin, c) for u, c in T.term if u == s]
    sgn = None if T.sgn is None else {**T.sgn, twin: T.sgn[s]}
    return Cts(list(T.states) + [twin], T.init, trans, term, sgn, T.retro, T.variant)
