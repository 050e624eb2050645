"""Axiom schemas per variant and the instance-testing soundness harness."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .bisim import Verdict, bisim
from .conditions import (
    BOT,
    TOP,
    Cond,
    Endo,
    apply_endo,
    atom,
    format_cond,
    just_name,
    last_action_update,
    retro,
    retro_shift,
    retro_update,
)
from .generators import TermGen, default_config
from .sos import cts_of
from .terms import (
    DELTA,
    DELTA_NAME,
    EPS,
    NEX,
    Action,
    AlgebraConfig,
    Alt,
    CommMerge,
    CondEval,
    Emit,
    Encap,
    GenCondEval,
    Guard,
    LastActionUpdate,
    LeftMerge,
    Par,
    RetroShift0,
    RetroShiftN,
    RetroUpdate,
    Seq,
    StateOp,
    StateTables,
    Term,
    format_term,
)

SUITES = ("acpec", "acpecs", "acpecr", "acpecr_lastaction", "acpec_ext", "acpecr_ext")


class Draw:
    """Source of metavariable values for one instantiation."""

    def __init__(self, cfg: AlgebraConfig, rng: random.Random, depth: int = 4):
        self.cfg = cfg
        self.rng = rng
        self.gen = TermGen(cfg, rng, depth=depth, merges=True)

    def x(self) -> Term:
        return self.gen.term()

    def a(self) -> str:
        return self.gen.action(with_delta=True)

    def act(self) -> str:
        return self.gen.action()

    def phi(self) -> Cond:
        return self.gen.cond()

    def H(self) -> frozenset:
        return self.gen.subset()

    def n(self) -> int:
        return self.rng.randint(0, 2)

    def endo(self) -> Endo:
        names = sorted(a for a in self.cfg.atoms)
        return Endo({k: random_plain_cond(self.rng, names) for k in names if self.rng.random() < 0.7})

    def named_endo(self) -> Endo:
        return self.cfg.endos[self.rng.choice(sorted(k for k in self.cfg.endos if k != "id"))]

    def state(self) -> str:
        return self.rng.choice(self.cfg.state_ops.states)


def random_plain_cond(rng: random.Random, atoms: list[str]) -> Cond:
    from .generators import random_cond

    return random_cond(rng, atoms, 2, 0)


def A(a: str) -> Term:
    return DELTA if a == DELTA_NAME else Action(a)


def all_actions(cfg: AlgebraConfig) -> frozenset:
    return frozenset(cfg.actions)


@dataclass(frozen=True)
class Axiom:
    name: str
    table: str
    build: Callable[[Draw], tuple[Term, Term]]


def _ax(table: str):
    out: list[Axiom] = []

    def add(name: str):
        def deco(f):
            out.append(Axiom(name, table, f))
            return f
        return deco

    return out, add


def _cond_law(lhs: Callable[[Draw], tuple[Cond, Cond]]):
    """Embed a law between conditions as an equation between guarded commands."""

    def build(d: Draw):
        l, r = lhs(d)
        x = d.x()
        return Guard(l, x), Guard(r, x)

    return build


def _ba_laws(add) -> None:
    add("BA1")(_cond_law(lambda d: (lambda p: (p | BOT, p))(d.phi())))
    add("BA2")(_cond_law(lambda d: (lambda p: (p | ~p, TOP))(d.phi())))
    add("BA3")(_cond_law(lambda d: (lambda p, q: (p | q, q | p))(d.phi(), d.phi())))
    add("BA4")(_cond_law(lambda d: (lambda p, q, r: (p | (q & r), (p | q) & (p | r)))(d.phi(), d.phi(), d.phi())))
    add("BA5")(_cond_law(lambda d: (lambda p: (p & TOP, p))(d.phi())))
    add("BA6")(_cond_law(lambda d: (lambda p: (p & ~p, BOT))(d.phi())))
    add("BA7")(_cond_law(lambda d: (lambda p, q: (p & q, q & p))(d.phi(), d.phi())))
    add("BA8")(_cond_law(lambda d: (lambda p, q, r: (p & (q | r), (p & q) | (p & r)))(d.phi(), d.phi(), d.phi())))


# ---------------------------------------------------------------- ACPec

ACPEC, _add = _ax("Axioms of ACPec")


@_add("A1")
def _(d):
    x, y = d.x(), d.x()
    return Alt(x, y), Alt(y, x)


@_add("A2")
def _(d):
    x, y, z = d.x(), d.x(), d.x()
    return Alt(Alt(x, y), z), Alt(x, Alt(y, z))


@_add("A3")
def _(d):
    x = d.x()
    return Alt(x, x), x


@_add("A4")
def _(d):
    x, y, z = d.x(), d.x(), d.x()
    return Seq(Alt(x, y), z), Alt(Seq(x, z), Seq(y, z))


@_add("A5")
def _(d):
    x, y, z = d.x(), d.x(), d.x()
    return Seq(Seq(x, y), z), Seq(x, Seq(y, z))


@_add("A6")
def _(d):
    x = d.x()
    return Alt(x, DELTA), x


@_add("A7")
def _(d):
    return Seq(DELTA, d.x()), DELTA


@_add("A8")
def _(d):
    x = d.x()
    return Seq(x, EPS), x


@_add("A9")
def _(d):
    x = d.x()
    return Seq(EPS, x), x


@_add("CM1T")
def _(d):
    x, y = d.x(), d.x()
    act = all_actions(d.cfg)
    rhs = Alt(Alt(Alt(LeftMerge(x, y), LeftMerge(y, x)), CommMerge(x, y)), Seq(Encap(act, x), Encap(act, y)))
    return Par(x, y), rhs


@_add("TM2")
def _(d):
    return LeftMerge(EPS, d.x()), DELTA


@_add("CM3")
def _(d):
    a, x, y = d.a(), d.x(), d.x()
    return LeftMerge(Seq(A(a), x), y), Seq(A(a), Par(x, y))


@_add("CM4")
def _(d):
    x, y, z = d.x(), d.x(), d.x()
    return LeftMerge(Alt(x, y), z), Alt(LeftMerge(x, z), LeftMerge(y, z))


@_add("TM5")
def _(d):
    return CommMerge(EPS, d.x()), DELTA


@_add("TM6")
def _(d):
    return CommMerge(d.x(), EPS), DELTA


@_add("CM7")
def _(d):
    a, b, x, y = d.a(), d.a(), d.x(), d.x()
    return CommMerge(Seq(A(a), x), Seq(A(b), y)), Seq(CommMerge(A(a), A(b)), Par(x, y))


@_add("CM8")
def _(d):
    x, y, z = d.x(), d.x(), d.x()
    return CommMerge(Alt(x, y), z), Alt(CommMerge(x, z), CommMerge(y, z))


@_add("CM9")
def _(d):
    x, y, z = d.x(), d.x(), d.x()
    return CommMerge(x, Alt(y, z)), Alt(CommMerge(x, y), CommMerge(x, z))


@_add("C1")
def _(d):
    a, b = d.a(), d.a()
    return CommMerge(A(a), A(b)), CommMerge(A(b), A(a))


@_add("C2")
def _(d):
    a, b, c = d.a(), d.a(), d.a()
    return CommMerge(CommMerge(A(a), A(b)), A(c)), CommMerge(A(a), CommMerge(A(b), A(c)))


@_add("C3")
def _(d):
    return CommMerge(DELTA, A(d.a())), DELTA


@_add("D0")
def _(d):
    return Encap(d.H(), EPS), EPS


@_add("D1")
def _(d):
    H, a = d.H(), d.act()
    H = H - {a}
    return Encap(H, A(a)), A(a)


@_add("D2")
def _(d):
    a = d.act()
    H = d.H() | {a}
    return Encap(H, A(a)), DELTA


@_add("D3")
def _(d):
    H, x, y = d.H(), d.x(), d.x()
    return Encap(H, Alt(x, y)), Alt(Encap(H, x), Encap(H, y))


@_add("D4")
def _(d):
    H, x, y = d.H(), d.x(), d.x()
    return Encap(H, Seq(x, y)), Seq(Encap(H, x), Encap(H, y))


@_add("GC1")
def _(d):
    x = d.x()
    return Guard(TOP, x), x


@_add("GC2")
def _(d):
    return Guard(BOT, d.x()), DELTA


@_add("GC3")
def _(d):
    return Guard(d.phi(), DELTA), DELTA


@_add("GC4")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return Guard(p, Alt(x, y)), Alt(Guard(p, x), Guard(p, y))


@_add("GC5")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return Seq(Guard(p, x), y), Guard(p, Seq(x, y))


@_add("GC6")
def _(d):
    p, q, x = d.phi(), d.phi(), d.x()
    return Guard(p, Guard(q, x)), Guard(p & q, x)


@_add("GC7")
def _(d):
    p, q, x = d.phi(), d.phi(), d.x()
    return Guard(p | q, x), Alt(Guard(p, x), Guard(q, x))


@_add("GC8")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return LeftMerge(Guard(p, x), y), Guard(p, LeftMerge(x, y))


@_add("GC9")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return CommMerge(Guard(p, x), y), Guard(p, CommMerge(x, y))


@_add("GC10")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return CommMerge(x, Guard(p, y)), Guard(p, CommMerge(x, y))


@_add("GC11")
def _(d):
    H, p, x = d.H(), d.phi(), d.x()
    return Encap(H, Guard(p, x)), Guard(p, Encap(H, x))


_ba_laws(_add)


# ---------------------------------------------------------------- ACPecs

ACPECS, _add = _ax("Axioms adapted to signal emission")


def _dA(d, x):
    return Encap(all_actions(d.cfg), x)


@_add("CM2ST")
def _(d):
    x = d.x()
    return LeftMerge(EPS, x), _dA(d, x)


@_add("CM3S")
def _(d):
    a, x, y = d.a(), d.x(), d.x()
    return LeftMerge(Seq(A(a), x), y), Alt(Seq(A(a), Par(x, y)), _dA(d, y))


@_add("GC8S")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return LeftMerge(Guard(p, x), y), Alt(Guard(p, LeftMerge(x, y)), _dA(d, y))


@_add("GC9S")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return CommMerge(Guard(p, x), y), Alt(Guard(p, CommMerge(x, y)), _dA(d, y))


@_add("GC10S")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return CommMerge(x, Guard(p, y)), Alt(Guard(p, CommMerge(x, y)), _dA(d, x))


_SE, _add = _ax("Additional axioms for signal emission")


@_add("NE1")
def _(d):
    return Alt(d.x(), NEX), NEX


@_add("NE2")
def _(d):
    return Seq(NEX, d.x()), NEX


@_add("NE3")
def _(d):
    return Seq(A(d.a()), NEX), DELTA


@_add("SE1")
def _(d):
    x = d.x()
    return Emit(TOP, x), x


@_add("SE2")
def _(d):
    return Emit(BOT, d.x()), NEX


@_add("SE3")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return Alt(Emit(p, x), y), Emit(p, Alt(x, y))


@_add("SE4")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return Seq(Emit(p, x), y), Emit(p, Seq(x, y))


@_add("SE5")
def _(d):
    p, q, x = d.phi(), d.phi(), d.x()
    return Emit(p, Emit(q, x)), Emit(p & q, x)


@_add("SE6")
def _(d):
    p, x = d.phi(), d.x()
    return Emit(p, Guard(p, x)), Emit(p, x)


@_add("SE7")
def _(d):
    p, q, x = d.phi(), d.phi(), d.x()
    return Guard(p, Emit(q, x)), Emit(~p | q, Guard(p, x))


@_add("SE8")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return LeftMerge(Emit(p, x), y), Emit(p, LeftMerge(x, y))


@_add("SE9")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return CommMerge(Emit(p, x), y), Emit(p, CommMerge(x, y))


@_add("SE10")
def _(d):
    p, x, y = d.phi(), d.x(), d.x()
    return CommMerge(x, Emit(p, y)), Emit(p, CommMerge(x, y))


@_add("SE11")
def _(d):
    H, p, x = d.H(), d.phi(), d.x()
    return Encap(H, Emit(p, x)), Emit(p, Encap(H, x))


# ---------------------------------------------------------------- ACPecr

ACPECR, _add = _ax("Axioms adapted to retrospection")


@_add("CM3R")
def _(d):
    a, x, y = d.a(), d.x(), d.x()
    return LeftMerge(Seq(A(a), x), y), Seq(A(a), Par(x, RetroShift0(y)))


_R, _add = _ax("Additional axioms for retrospection")

_add("R1")(_cond_law(lambda d: (retro(BOT), BOT)))
_add("R2")(_cond_law(lambda d: (retro(TOP), TOP)))
_add("R3")(_cond_law(lambda d: (lambda p: (retro(~p), ~retro(p)))(d.phi())))
_add("R4")(_cond_law(lambda d: (lambda p, q: (retro(p | q), retro(p) | retro(q)))(d.phi(), d.phi())))
_add("R5")(_cond_law(lambda d: (lambda p, q: (retro(p & q), retro(p) & retro(q)))(d.phi(), d.phi())))


@_add("R6")
def _(d):
    a, p, x = d.a(), d.phi(), d.x()
    return Seq(A(a), Guard(retro(p), x)), Alt(Guard(p, Seq(A(a), x)), Guard(~p, Seq(A(a), DELTA)))


@_add("RS0")
def _(d):
    x = d.x()
    return RetroShift0(x), RetroShiftN(0, x)


@_add("RS1T")
def _(d):
    return RetroShiftN(d.n(), EPS), EPS


@_add("RS2")
def _(d):
    n, a, x = d.n(), d.a(), d.x()
    return RetroShiftN(n, Seq(A(a), x)), Seq(A(a), RetroShiftN(n + 1, x))


@_add("RS3")
def _(d):
    n, x, y = d.n(), d.x(), d.x()
    return RetroShiftN(n, Alt(x, y)), Alt(RetroShiftN(n, x), RetroShiftN(n, y))


@_add("RS4")
def _(d):
    n, p, x = d.n(), d.phi(), d.x()
    return RetroShiftN(n, Guard(p, x)), Guard(retro_shift(n, p), RetroShiftN(n, x))


def _rs(n_of, lhs, rhs):
    def law(d):
        n = n_of(d)
        p, q = d.phi(), d.phi()
        return lhs(n, p, q), rhs(n, p, q)
    return _cond_law(law)


_add("RS5")(_rs(lambda d: d.n(), lambda n, p, q: retro_shift(n, BOT), lambda n, p, q: BOT))
_add("RS6")(_rs(lambda d: d.n(), lambda n, p, q: retro_shift(n, TOP), lambda n, p, q: TOP))


@_add("RS7")
def _(d):
    n, x = d.n(), d.x()
    eta = atom(d.rng.choice(sorted(d.cfg.atoms)))
    return Guard(retro_shift(n, eta), x), Guard(eta, x)


_add("RS8")(_rs(lambda d: d.n(), lambda n, p, q: retro_shift(n, ~p), lambda n, p, q: ~retro_shift(n, p)))
_add("RS9")(_rs(lambda d: d.n(), lambda n, p, q: retro_shift(n, p | q),
                lambda n, p, q: retro_shift(n, p) | retro_shift(n, q)))
_add("RS10")(_rs(lambda d: d.n(), lambda n, p, q: retro_shift(n, p & q),
                 lambda n, p, q: retro_shift(n, p) & retro_shift(n, q)))
_add("RS11")(_rs(lambda d: 0, lambda n, p, q: retro_shift(0, retro(p)), lambda n, p, q: retro(retro(p))))
_add("RS12")(_rs(lambda d: d.n(), lambda n, p, q: retro_shift(n + 1, retro(p)),
                 lambda n, p, q: retro(retro_shift(n, p))))


# ---------------------------------------------------------------- last action conditions

LASTACTION, _add = _ax("Additional axioms for last action conditions")


@_add("J")
def _(d):
    a, x = d.act(), d.x()
    return Seq(Action(a), x), Seq(Action(a), Guard(atom(just_name(a)), x))


_LA, _add = _ax("Axioms adapted to last action conditions")


@_add("CM7J")
def _(d):
    a, b, x, y = d.a(), d.a(), d.x(), d.x()
    return (CommMerge(Seq(A(a), x), Seq(A(b), y)),
            Seq(CommMerge(A(a), A(b)), Par(LastActionUpdate(a, 0, x), LastActionUpdate(b, 0, y))))


def _just(d):
    return atom(just_name(d.act()))


_add("RS7Ja")(_cond_law(lambda d: (lambda j: (retro_shift(0, j), retro(j)))(_just(d))))
_add("RS7Jb")(_cond_law(lambda d: (lambda j, n: (retro_shift(n + 1, j), j))(_just(d), d.n())))


@_add("LAU1T")
def _(d):
    return LastActionUpdate(d.a(), d.n(), EPS), EPS


@_add("LAU2")
def _(d):
    a, n, b, x = d.a(), d.n(), d.a(), d.x()
    return LastActionUpdate(a, n, Seq(A(b), x)), Seq(A(b), LastActionUpdate(a, n + 1, x))


@_add("LAU3")
def _(d):
    a, n, x, y = d.a(), d.n(), d.x(), d.x()
    return LastActionUpdate(a, n, Alt(x, y)), Alt(LastActionUpdate(a, n, x), LastActionUpdate(a, n, y))


@_add("LAU4")
def _(d):
    a, n, p, x = d.a(), d.n(), d.phi(), d.x()
    return LastActionUpdate(a, n, Guard(p, x)), Guard(last_action_update(a, n, p), LastActionUpdate(a, n, x))


def _lau(lhs, rhs, n_of=lambda d: d.n()):
    def law(d):
        a, n, p, q = d.a(), n_of(d), d.phi(), d.phi()
        return lhs(a, n, p, q, d), rhs(a, n, p, q, d)
    return _cond_law(law)


_add("LAU5")(_lau(lambda a, n, p, q, d: last_action_update(a, n, BOT), lambda *_: BOT))
_add("LAU6")(_lau(lambda a, n, p, q, d: last_action_update(a, n, TOP), lambda *_: TOP))


@_add("LAU7")
def _(d):
    a = d.a()
    c = d.rng.choice([x for x in sorted(d.cfg.actions) if x != a])
    x = d.x()
    return Guard(last_action_update(a, 0, atom(just_name(c))), x), Guard(BOT, x)


@_add("LAU8")
def _(d):
    a, x = d.act(), d.x()
    return Guard(last_action_update(a, 0, atom(just_name(a))), x), Guard(TOP, x)


@_add("LAU9")
def _(d):
    a, n, j, x = d.a(), d.n(), _just(d), d.x()
    return Guard(last_action_update(a, n + 1, j), x), Guard(j, x)


_add("LAU10")(_lau(lambda a, n, p, q, d: last_action_update(a, n, ~p),
                   lambda a, n, p, q, d: ~last_action_update(a, n, p)))
_add("LAU11")(_lau(lambda a, n, p, q, d: last_action_update(a, n, p | q),
                   lambda a, n, p, q, d: last_action_update(a, n, p) | last_action_update(a, n, q)))
_add("LAU12")(_lau(lambda a, n, p, q, d: last_action_update(a, n, p & q),
                   lambda a, n, p, q, d: last_action_update(a, n, p) & last_action_update(a, n, q)))
_add("LAU13")(_lau(lambda a, n, p, q, d: last_action_update(a, 0, retro(p)), lambda a, n, p, q, d: retro(p),
                   n_of=lambda d: 0))
_add("LAU14")(_lau(lambda a, n, p, q, d: last_action_update(a, n + 1, retro(p)),
                   lambda a, n, p, q, d: retro(last_action_update(a, n, p))))


# ---------------------------------------------------------------- condition evaluation and state operators

ACPEC_EXT, _add = _ax("Axioms for condition evaluation")


@_add("CE1T")
def _(d):
    return CondEval(d.endo(), EPS), EPS


@_add("CE2")
def _(d):
    h, a, x = d.endo(), d.a(), d.x()
    return CondEval(h, Seq(A(a), x)), Seq(A(a), CondEval(h, x))


@_add("CE3")
def _(d):
    h, x, y = d.endo(), d.x(), d.x()
    return CondEval(h, Alt(x, y)), Alt(CondEval(h, x), CondEval(h, y))


@_add("CE4")
def _(d):
    h, p, x = d.endo(), d.phi(), d.x()
    return CondEval(h, Guard(p, x)), Guard(apply_endo(h, p), CondEval(h, x))


@_add("CE5")
def _(d):
    h, g, x = d.endo(), d.endo(), d.x()
    return CondEval(h, CondEval(g, x)), CondEval(h.compose(g), x)


def _ce_cond(lhs, rhs):
    def law(d):
        h, p, q = d.endo(), d.phi(), d.phi()
        return lhs(h, p, q), rhs(h, p, q)
    return _cond_law(law)


_add("CE6")(_ce_cond(lambda h, p, q: apply_endo(h, BOT), lambda *_: BOT))
_add("CE7")(_ce_cond(lambda h, p, q: apply_endo(h, TOP), lambda *_: TOP))


@_add("CE8")
def _(d):
    name = d.rng.choice(sorted(d.cfg.atoms))
    img = d.rng.choice([TOP, BOT] + [atom(a) for a in sorted(d.cfg.atoms)])
    h = Endo({name: img})
    x = d.x()
    return Guard(apply_endo(h, atom(name)), x), Guard(img, x)


_add("CE9")(_ce_cond(lambda h, p, q: apply_endo(h, ~p), lambda h, p, q: ~apply_endo(h, p)))
_add("CE10")(_ce_cond(lambda h, p, q: apply_endo(h, p | q), lambda h, p, q: apply_endo(h, p) | apply_endo(h, q)))
_add("CE11")(_ce_cond(lambda h, p, q: apply_endo(h, p & q), lambda h, p, q: apply_endo(h, p) & apply_endo(h, q)))

_GCE, _add = _ax("Axioms for generalized condition evaluation")


@_add("GCE1T")
def _(d):
    return GenCondEval(d.named_endo(), EPS), EPS


@_add("GCE2")
def _(d):
    h, a, x = d.named_endo(), d.a(), d.x()
    return GenCondEval(h, Seq(A(a), x)), Seq(A(a), GenCondEval(d.cfg.eff_gce_of(a, h), x))


@_add("GCE3")
def _(d):
    h, x, y = d.named_endo(), d.x(), d.x()
    return GenCondEval(h, Alt(x, y)), Alt(GenCondEval(h, x), GenCondEval(h, y))


@_add("GCE4")
def _(d):
    h, p, x = d.named_endo(), d.phi(), d.x()
    return GenCondEval(h, Guard(p, x)), Guard(apply_endo(h, p), GenCondEval(h, x))


_SO, _add = _ax("Axioms for state operators")


@_add("SO1T")
def _(d):
    return StateOp(d.state(), EPS), EPS


@_add("SO2")
def _(d):
    s, a, x = d.state(), d.a(), d.x()
    tab = d.cfg.state_ops
    return StateOp(s, Seq(A(a), x)), Seq(A(tab.act_of(a, s)), StateOp(tab.eff_of(a, s), x))


@_add("SO3")
def _(d):
    s, x, y = d.state(), d.x(), d.x()
    return StateOp(s, Alt(x, y)), Alt(StateOp(s, x), StateOp(s, y))


@_add("SO4")
def _(d):
    s, p, x = d.state(), d.phi(), d.x()
    return StateOp(s, Guard(p, x)), Guard(apply_endo(d.cfg.state_ops.eval[s], p), StateOp(s, x))


def _so_cond(lhs, rhs):
    def law(d):
        ev, p, q = d.cfg.state_ops.eval[d.state()], d.phi(), d.phi()
        return lhs(ev, p, q), rhs(ev, p, q)
    return _cond_law(law)


_add("SO5")(_so_cond(lambda h, p, q: apply_endo(h, BOT), lambda *_: BOT))
_add("SO6")(_so_cond(lambda h, p, q: apply_endo(h, TOP), lambda *_: TOP))


@_add("SO7")
def _(d):
    s = d.state()
    name = d.rng.choice(sorted(d.cfg.atoms))
    ev = d.cfg.state_ops.eval[s]
    x = d.x()
    return Guard(apply_endo(ev, atom(name)), x), Guard(ev.image(name), x)


_add("SO8")(_so_cond(lambda h, p, q: apply_endo(h, ~p), lambda h, p, q: ~apply_endo(h, p)))
_add("SO9")(_so_cond(lambda h, p, q: apply_endo(h, p | q), lambda h, p, q: apply_endo(h, p) | apply_endo(h, q)))
_add("SO10")(_so_cond(lambda h, p, q: apply_endo(h, p & q), lambda h, p, q: apply_endo(h, p) & apply_endo(h, q)))


ACPECR_EXT, _add = _ax("New axioms for (generalized) condition evaluation")


@_add("CE1T")
def _(d):
    return CondEval(d.endo(), EPS), EPS


@_add("CE2R")
def _(d):
    h, a, x = d.endo(), d.a(), d.x()
    return CondEval(h, Seq(A(a), x)), Seq(A(a), CondEval(h, RetroUpdate(h, 1, x)))


@_add("CE3")
def _(d):
    h, x, y = d.endo(), d.x(), d.x()
    return CondEval(h, Alt(x, y)), Alt(CondEval(h, x), CondEval(h, y))


@_add("CE4R")
def _(d):
    h, p, x = d.endo(), d.phi(), d.x()
    return CondEval(h, Guard(p, x)), Guard(retro_update(h, 0, p), CondEval(h, x))


@_add("GCE1T")
def _(d):
    return GenCondEval(d.named_endo(), EPS), EPS


@_add("GCE2R")
def _(d):
    h, a, x = d.named_endo(), d.a(), d.x()
    return GenCondEval(h, Seq(A(a), x)), Seq(A(a), GenCondEval(d.cfg.eff_gce_of(a, h), RetroUpdate(h, 1, x)))


@_add("GCE3")
def _(d):
    h, x, y = d.named_endo(), d.x(), d.x()
    return GenCondEval(h, Alt(x, y)), Alt(GenCondEval(h, x), GenCondEval(h, y))


@_add("GCE4R")
def _(d):
    h, p, x = d.named_endo(), d.phi(), d.x()
    return GenCondEval(h, Guard(p, x)), Guard(retro_update(h, 0, p), GenCondEval(h, x))


_RU, _add = _ax("Axioms for retrospection update")


@_add("RU1T")
def _(d):
    return RetroUpdate(d.endo(), d.n(), EPS), EPS


@_add("RU2")
def _(d):
    h, n, a, x = d.endo(), d.n(), d.a(), d.x()
    return RetroUpdate(h, n, Seq(A(a), x)), Seq(A(a), RetroUpdate(h, n + 1, x))


@_add("RU3")
def _(d):
    h, n, x, y = d.endo(), d.n(), d.x(), d.x()
    return RetroUpdate(h, n, Alt(x, y)), Alt(RetroUpdate(h, n, x), RetroUpdate(h, n, y))


@_add("RU4")
def _(d):
    h, n, p, x = d.endo(), d.n(), d.phi(), d.x()
    return RetroUpdate(h, n, Guard(p, x)), Guard(retro_update(h, n, p), RetroUpdate(h, n, x))


def _ru(lhs, rhs, n_of=lambda d: d.n()):
    def law(d):
        h, n, p, q = d.endo(), n_of(d), d.phi(), d.phi()
        return lhs(h, n, p, q), rhs(h, n, p, q)
    return _cond_law(law)


_add("RU5")(_ru(lambda h, n, p, q: retro_update(h, n, BOT), lambda *_: BOT))
_add("RU6")(_ru(lambda h, n, p, q: retro_update(h, n, TOP), lambda *_: TOP))


@_add("RU7")
def _(d):
    name = d.rng.choice(sorted(d.cfg.atoms))
    img = d.rng.choice([TOP, BOT] + [atom(a) for a in sorted(d.cfg.atoms)])
    h = Endo({name: img})
    x = d.x()
    return Guard(retro_update(h, 0, atom(name)), x), Guard(img, x)


@_add("RU8")
def _(d):
    h, n, x = d.endo(), d.n(), d.x()
    eta = atom(d.rng.choice(sorted(d.cfg.atoms)))
    return Guard(retro_update(h, n + 1, eta), x), Guard(eta, x)


_add("RU9")(_ru(lambda h, n, p, q: retro_update(h, n, ~p), lambda h, n, p, q: ~retro_update(h, n, p)))
_add("RU10")(_ru(lambda h, n, p, q: retro_update(h, n, p | q),
                 lambda h, n, p, q: retro_update(h, n, p) | retro_update(h, n, q)))
_add("RU11")(_ru(lambda h, n, p, q: retro_update(h, n, p & q),
                 lambda h, n, p, q: retro_update(h, n, p) & retro_update(h, n, q)))
_add("RU12")(_ru(lambda h, n, p, q: retro_update(h, 0, retro(p)), lambda h, n, p, q: retro(p), n_of=lambda d: 0))
_add("RU13")(_ru(lambda h, n, p, q: retro_update(h, n + 1, retro(p)),
                 lambda h, n, p, q: retro(retro_update(h, n, p))))


# ---------------------------------------------------------------- suites

def suite_config(suite: str) -> AlgebraConfig:
    """Configuration the instances of a suite are drawn over."""
    if suite in ("acpec", "acpecs", "acpecr", "acpecr_lastaction"):
        return default_config(suite)
    variant = "acpec" if suite == "acpec_ext" else "acpecr"
    cfg = default_config(variant)
    p, q, r = atom("p"), atom("q"), atom("r")
    cfg.endos.update({
        "h1": Endo({"p": TOP, "q": ~p}, "h1"),
        "h2": Endo({"q": BOT, "r": p & q}, "h2"),
        "h3": Endo({"p": q | r}, "h3"),
    })
    cfg.eff_gce.update({("a", "h1"): "h2", ("b", "h1"): "h3", ("a", "h2"): "h3", ("c", "h3"): "h1"})
    cfg.state_ops = StateTables(
        ["s0", "s1"],
        {"s0": cfg.endos["h1"], "s1": cfg.endos["h2"]},
        {("a", "s0"): "b", ("c", "s1"): DELTA_NAME},
        {("a", "s0"): "s1", ("b", "s1"): "s0"},
    )
    return cfg


def suite_axioms(suite: str) -> list[Axiom]:
    return {
        "acpec": ACPEC,
        "acpecs": ACPECS + _SE,
        "acpecr": ACPECR + _R,
        "acpecr_lastaction": LASTACTION + _LA,
        "acpec_ext": ACPEC_EXT + _GCE + _SO,
        "acpecr_ext": ACPECR_EXT + _RU,
    }[suite]


def bisim_kind(cfg: AlgebraConfig) -> tuple[str, str]:
    if cfg.signals:
        return "signal", "plain"
    if cfg.retro:
        return "retro", "last_action" if cfg.exclusive else "plain"
    return "plain", "plain"


@dataclass
class Failure:
    axiom: str
    instance: int
    seed: str
    lhs: str
    rhs: str
    obligation: dict | None

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "instance": self.instance, "seed": self.seed, "lhs": self.lhs,
                "rhs": self.rhs, "obligation": self.obligation}


@dataclass
class AxiomResult:
    name: str
    table: str
    run: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)


@dataclass
class SuiteReport:
    suite: str
    variant: str
    seed: int
    n: int
    results: list
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.passed == r.run for r in self.results)

    def failed_axioms(self) -> list[str]:
        return [r.name for r in self.results if r.passed != r.run]

    def to_json(self, max_failures: int = 3) -> dict:
        return {
            "suite": self.suite,
            "variant": self.variant,
            "seed": self.seed,
            "n": self.n,
            "seconds": round(self.seconds, 3),
            "ok": self.ok,
            "axioms": [
                {"axiom": r.name, "table": r.table, "run": r.run, "passed": r.passed,
                 "failures": [f.to_json() for f in r.failures[:max_failures]]}
                for r in self.results
            ],
        }


def instance_rng(seed: int, axiom: str, i: int) -> random.Random:
    return random.Random(f"{seed}:{axiom}:{i}")


def check_instance(lhs: Term, rhs: Term, cfg: AlgebraConfig) -> Verdict:
    kind, mode = bisim_kind(cfg)
    return bisim(kind, cts_of(lhs, cfg), cts_of(rhs, cfg), mode)


def run_suite(suite: str, n: int = 100, seed: int = 0, axioms: list[Axiom] | None = None,
              depth: int = 4, only: set[str] | None = None) -> SuiteReport:
    cfg = suite_config(suite)
    todo = suite_axioms(suite) if axioms is None else axioms
    if only:
        todo = [a for a in todo if a.name in only]
    t0 = time.perf_counter()
    results = []
    for ax in todo:
        res = AxiomResult(ax.name, ax.table)
        for i in range(n):
            rng = instance_rng(seed, ax.name, i)
            lhs, rhs = ax.build(Draw(cfg, rng, depth))
            v = check_instance(lhs, rhs, cfg)
            res.run += 1
            if v.related:
                res.passed += 1
            else:
                L, R = cts_of(lhs, cfg), cts_of(rhs, cfg)
                res.failures.append(Failure(ax.name, i, f"{seed}:{ax.name}:{i}", format_term(lhs),
                                            format_term(rhs), v.to_json(L, R).get("obligation")))
        results.append(res)
    return SuiteReport(suite, cfg.variant, seed, n, results, time.perf_counter() - t0)


def corrupted_axiom() -> Axiom:
    """x + y = x: false in general, used to check that the harness reports failures."""
    return Axiom("BROKEN", "test only", lambda d: (lambda x, y: (Alt(x, y), x))(d.x(), d.x()))


def describe_cond(c: Cond) -> str:
    return format_cond(c)
