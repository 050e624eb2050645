"""Structural operational semantics: one-step derivation and reachable systems."""
from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass

from .conditions import (
    BOT,
    TOP,
    Cond,
    apply_endo,
    is_bot,
    last_action_update,
    retro_shift,
    retro_update,
    sup,
)
from .cts import Cts
from .errors import AcpError, UnguardedError, VariantError
from .terms import (
    DELTA_NAME,
    EPS,
    Action,
    AlgebraConfig,
    Alt,
    CommMerge,
    CondEval,
    Deadlock,
    Emit,
    Empty,
    Encap,
    GenCondEval,
    Guard,
    Inaccessible,
    LastActionUpdate,
    LeftMerge,
    Par,
    RecConst,
    RecSpec,
    RetroShift0,
    RetroShiftN,
    RetroUpdate,
    Seq,
    StateOp,
    Term,
    Var,
    guardedness_check,
)

DEFAULT_MAX_STATES = 10_000
DEFAULT_MAX_DEPTH = 64


@dataclass(frozen=True)
class StepSet:
    trans: tuple  # (cond, action, target)
    terms: tuple  # conditions
    signal: Cond = TOP


def mk_seq(x: Term, y: Term) -> Term:
    # eps . y has exactly the step set of y, so the state is shared
    return y if x == EPS else Seq(x, y)


class Engine:
    """Memoized semantics for one configuration.

    Terminations, signals and moves are three separate recursions so that
    signals and terminations of guarded recursion never need the moves of
    the term being expanded.
    """

    def __init__(self, cfg: AlgebraConfig):
        self.cfg = cfg
        self.ex = cfg.exclusive
        self._moves: dict[Term, tuple] = {}
        self._fin: dict[Term, tuple] = {}
        self._sig: dict[Term, Cond] = {}
        self.checked: set[RecSpec] = set()

    def nb(self, c: Cond) -> bool:
        return not is_bot(c, self.ex)

    def step(self, t: Term) -> StepSet:
        return StepSet(self.moves(t), self.fin(t), self.sig(t))

    # -------------------------------------------------------- signals

    def sig(self, t: Term) -> Cond:
        if not self.cfg.signals:
            return TOP
        r = self._sig.get(t)
        if r is None:
            r = self._sig_raw(t)
            self._sig[t] = r
        return r

    def _sig_raw(self, t: Term) -> Cond:
        k = type(t)
        if k is Inaccessible:
            return BOT
        if k in (Deadlock, Empty, Action):
            return TOP
        if k in (Alt, Par, LeftMerge, CommMerge):
            return self.sig(t.left) & self.sig(t.right)
        if k is Seq:
            sx = self.sig(t.left)
            tx = sup(self.fin(t.left))
            if tx.is_bot or sx.is_bot:
                return sx
            return sx & (~tx | self.sig(t.right))
        if k is Guard:
            return ~t.cond | self.sig(t.body)
        if k is Emit:
            return t.cond & self.sig(t.body)
        if k is Encap:
            return self.sig(t.body)
        if k is RecConst:
            self._check_guarded(t.spec)
            return self.sig(t.spec.body(t.var))
        raise VariantError(f"{k.__name__} has no signal semantics")

    # -------------------------------------------------------- terminations

    def fin(self, t: Term) -> tuple:
        r = self._fin.get(t)
        if r is None:
            r = self._fin_raw(t)
            if self.cfg.signals and r and self.sig(t).is_bot:
                r = ()
            self._fin[t] = r
        return r

    def _fin_raw(self, t: Term) -> tuple:
        k = type(t)
        cfg = self.cfg
        if k is Empty:
            return (TOP,)
        if k in (Deadlock, Action, Inaccessible, LeftMerge, CommMerge):
            return ()
        if k is Alt:
            return _uniq(self.fin(t.left) + self.fin(t.right))
        if k is Seq or k is Par:
            fx = self.fin(t.left)
            if not fx:
                return ()
            return self._meets(fx, self.fin(t.right))
        if k is Guard:
            return self._meets((t.cond,), self.fin(t.body))
        if k is Emit or k is Encap:
            return self.fin(t.body)
        if k is CondEval or k is GenCondEval:
            f = (lambda c: retro_update(t.h, 0, c)) if cfg.retro else (lambda c: apply_endo(t.h, c))
            return self._mapped(f, self.fin(t.body))
        if k is StateOp:
            ev = self._tables().eval[t.s]
            return self._mapped(lambda c: apply_endo(ev, c), self.fin(t.body))
        if k is RetroShift0 or k is RetroShiftN:
            n = 0 if k is RetroShift0 else t.n
            return self._mapped(lambda c: retro_shift(n, c), self.fin(t.body))
        if k is RetroUpdate:
            return self._mapped(lambda c: retro_update(t.h, t.n, c), self.fin(t.body))
        if k is LastActionUpdate:
            return self._mapped(lambda c: last_action_update(t.a, t.n, c), self.fin(t.body))
        if k is RecConst:
            self._check_guarded(t.spec)
            return self.fin(t.spec.body(t.var))
        if k is Var:
            raise AcpError(f"open term: free variable {t.name}")
        raise TypeError(f"not a term: {t!r}")

    def _meets(self, xs, ys) -> tuple:
        return _uniq([a & b for a in xs for b in ys if self.nb(a & b)])

    def _mapped(self, f, cs) -> tuple:
        return _uniq([d for d in map(f, cs) if self.nb(d)])

    def _tables(self):
        if self.cfg.state_ops is None:
            raise VariantError("state operator used without state tables")
        return self.cfg.state_ops

    # -------------------------------------------------------- moves

    def moves(self, t: Term) -> tuple:
        r = self._moves.get(t)
        if r is None:
            if self.cfg.signals and self.sig(t).is_bot:
                r = ()
            else:
                r = _uniq([m for m in self._moves_raw(t) if self.nb(m[0])])
                if self.cfg.signals:
                    r = tuple(m for m in r if not self.sig(m[2]).is_bot)
            self._moves[t] = r
        return r

    def _moves_raw(self, t: Term) -> list:
        cfg = self.cfg
        k = type(t)
        if k in (Deadlock, Empty, Inaccessible):
            return []
        if k is Action:
            return [(TOP, t.name, EPS)]
        if k is Alt:
            return list(self.moves(t.left) + self.moves(t.right))
        if k is Seq:
            out = [(c, a, mk_seq(x2, t.right)) for c, a, x2 in self.moves(t.left)]
            fx = self.fin(t.left)
            if fx:
                for c, a, y2 in self.moves(t.right):
                    out += [(phi & c, a, y2) for phi in fx]
            return out
        if k is Guard:
            return [(t.cond & c, a, x2) for c, a, x2 in self.moves(t.body)]
        if k is Emit:
            return list(self.moves(t.body))
        if k in (Par, LeftMerge, CommMerge):
            return self._merge(t)
        if k is Encap:
            return [(c, a, Encap(t.H, x2)) for c, a, x2 in self.moves(t.body) if a not in t.H]
        if k is CondEval or k is GenCondEval:
            out = []
            for c, a, x2 in self.moves(t.body):
                if cfg.retro:
                    c2, x2 = retro_update(t.h, 0, c), RetroUpdate(t.h, 1, x2)
                else:
                    c2 = apply_endo(t.h, c)
                h2 = cfg.eff_gce_of(a, t.h) if k is GenCondEval else t.h
                out.append((c2, a, k(h2, x2)))
            return out
        if k is StateOp:
            tab = self._tables()
            ev = tab.eval[t.s]
            out = []
            for c, a, x2 in self.moves(t.body):
                a2 = tab.act_of(a, t.s)
                if a2 != DELTA_NAME:
                    out.append((apply_endo(ev, c), a2, StateOp(tab.eff_of(a, t.s), x2)))
            return out
        if k is RetroShift0 or k is RetroShiftN:
            n = 0 if k is RetroShift0 else t.n
            return [(retro_shift(n, c), a, RetroShiftN(n + 1, x2)) for c, a, x2 in self.moves(t.body)]
        if k is RetroUpdate:
            return [(retro_update(t.h, t.n, c), a, RetroUpdate(t.h, t.n + 1, x2))
                    for c, a, x2 in self.moves(t.body)]
        if k is LastActionUpdate:
            return [(last_action_update(t.a, t.n, c), a, LastActionUpdate(t.a, t.n + 1, x2))
                    for c, a, x2 in self.moves(t.body)]
        if k is RecConst:
            self._check_guarded(t.spec)
            return list(self.moves(t.spec.body(t.var)))
        if k is Var:
            raise AcpError(f"open term: free variable {t.name}")
        raise TypeError(f"not a term: {t!r}")

    def _merge(self, t: Term) -> list:
        cfg = self.cfg
        k = type(t)
        mx, my = self.moves(t.left), self.moves(t.right)
        out = []
        if k is not CommMerge:
            ry = RetroShift0(t.right) if cfg.retro else t.right
            out += [(c, a, Par(x2, ry)) for c, a, x2 in mx]
        if k is Par:
            rx = RetroShift0(t.left) if cfg.retro else t.left
            out += [(c, a, Par(rx, y2)) for c, a, y2 in my]
        if k is not LeftMerge:
            for c1, a1, x2 in mx:
                for c2, a2, y2 in my:
                    g = cfg.gamma_of(a1, a2)
                    if g == DELTA_NAME:
                        continue
                    if cfg.exclusive:
                        x2, y2 = LastActionUpdate(a1, 0, x2), LastActionUpdate(a2, 0, y2)
                    out.append((c1 & c2, g, Par(x2, y2)))
        return out

    def _check_guarded(self, spec: RecSpec) -> None:
        if spec in self.checked:
            return
        ok, why = guardedness_check(spec, self.cfg)
        if not ok:
            raise UnguardedError(f"unguarded recursive specification {spec.name}: {why}")
        self.checked.add(spec)


def _uniq(xs) -> tuple:
    return tuple(dict.fromkeys(xs))


_engines: dict[int, tuple[AlgebraConfig, Engine]] = {}
_engines_lock = threading.Lock()


def engine(cfg: AlgebraConfig) -> Engine:
    with _engines_lock:
        hit = _engines.get(id(cfg))
        if hit is None or hit[0] is not cfg:
            if len(_engines) > 64:
                _engines.clear()
            hit = (cfg, Engine(cfg))
            _engines[id(cfg)] = hit
        return hit[1]


def step(t: Term, cfg: AlgebraConfig) -> StepSet:
    return engine(cfg).step(t)


def signal(t: Term, cfg: AlgebraConfig) -> Cond:
    return engine(cfg).sig(t)


def cts_of(t: Term, cfg: AlgebraConfig, max_states: int = DEFAULT_MAX_STATES,
           max_depth: int = DEFAULT_MAX_DEPTH) -> Cts:
    """Breadth-first closure of step from t; the result's exhausted flag marks truncation."""
    eng = engine(cfg)
    depth = {t: 0}
    order = [t]
    q = deque([t])
    trans, term = [], []
    exhausted = False
    while q:
        s = q.popleft()
        term += [(s, c) for c in eng.fin(s)]
        mv = eng.moves(s)
        if depth[s] >= max_depth and mv:
            exhausted = True
            continue
        for c, a, s2 in mv:
            if s2 not in depth:
                if len(order) >= max_states:
                    exhausted = True
                    continue
                depth[s2] = depth[s] + 1
                order.append(s2)
                q.append(s2)
            trans.append((s, c, a, s2))
    sgn = {s: eng.sig(s) for s in order} if cfg.signals else None
    return Cts(order, t, trans, term, sgn, cfg.retro, cfg.variant, exhausted)
