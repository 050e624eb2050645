"""Axiom-directed normalization to basic terms and equality by normal forms.

A normal form is a set of summands ``cond :-> head`` where a head is either
the empty process or an action prefix ``a . NF``; equal heads are merged by
joining their conditions.  With signals every level also carries the signal it
emits.  With retrospection, conditions below the root only mention the
current state: everything older is pulled up through the prefixes (the
generalized form of R6), so two normal forms can be compared level by level.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .conditions import (
    BOT,
    TOP,
    Atom,
    Cond,
    apply_endo,
    atom,
    is_bot,
    just_action,
    last_action_update,
    leq,
    retro_shift,
    retro_update,
    sort_key,
    substitute,
    support,
)
from .errors import AcpError, DeclarationError, RequiresUnfoldingError, VariantError
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
    RetroShift0,
    RetroShiftN,
    RetroUpdate,
    Seq,
    StateOp,
    Term,
    Var,
    check_variant,
)

EQUAL = "equal"
NOT_PROVED = "not_proved"

EPS_HEAD = ("eps",)


@dataclass(frozen=True, eq=False)
class NF:
    summands: tuple  # ((head, cond), ...), canonically sorted, heads distinct
    signal: Cond = TOP
    key: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (sort_key(self.signal),
                                         tuple((_head_key(h), sort_key(c)) for h, c in self.summands)))

    def __eq__(self, other):
        return isinstance(other, NF) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def heads(self) -> dict:
        return dict(self.summands)


def _head_key(h) -> tuple:
    return (0,) if h is EPS_HEAD or h == EPS_HEAD else (1, h[1], h[2].key)


DELTA_NF = NF(())
NEX_NF = NF((), BOT)
EPS_NF = NF(((EPS_HEAD, TOP),))


class Rewriter:
    def __init__(self, cfg: AlgebraConfig):
        self.cfg = cfg
        self.ex = cfg.exclusive
        self.signals = cfg.signals
        self.retro = cfg.retro
        self.memo: dict[Term, NF] = {}

    # -------------------------------------------------------- construction

    def mk(self, summands, signal: Cond = TOP) -> NF:
        if self.signals and signal.is_bot:
            return NEX_NF
        acc: dict = {}
        for c, h in summands:
            if self.signals:
                c = c & signal  # a guard only matters where the signal holds
            if is_bot(c, self.ex):
                continue
            acc[h] = acc[h] | c if h in acc else c
        items = [(h, c) for h, c in acc.items() if not is_bot(c, self.ex)]
        items.sort(key=lambda hc: (_head_key(hc[0]), sort_key(hc[1])))
        return NF(tuple(items), signal if self.signals else TOP)

    def prefix(self, a: str, C: NF) -> list:
        """Summands equal to ``a . C`` (J and the generalized R6 applied)."""
        if a == DELTA_NAME:
            return []
        if self.signals and C.signal.is_bot:
            return []  # NE3
        if self.ex:
            C = self.mk([(last_action_update(a, 0, c), h) for h, c in C.summands], C.signal)
        if not self.retro:
            return [(TOP, ("act", a, C))]
        old = sorted({x for _, c in C.summands for x in support(c) if x.depth >= 1})
        if not old:
            return [(TOP, ("act", a, C))]
        out = []
        for bits in itertools.product((False, True), repeat=len(old)):
            sigma = dict(zip(old, bits))
            if self.ex and not _at_most_one(sigma):
                continue
            guard = TOP
            for x, v in sigma.items():
                lit = atom(x.name, x.depth - 1)
                guard = guard & (lit if v else ~lit)
            sub = {x: (TOP if v else BOT) for x, v in sigma.items()}
            Cs = self.mk([(substitute(c, sub.get), h) for h, c in C.summands], C.signal)
            out.append((guard, ("act", a, Cs)))
        return out

    # -------------------------------------------------------- operators on normal forms

    def alt(self, X: NF, Y: NF) -> NF:
        return self.mk([(c, h) for h, c in X.summands + Y.summands], X.signal & Y.signal)

    def seq(self, X: NF, Y: NF) -> NF:
        out = []
        sig = X.signal
        for h, c in X.summands:
            if h == EPS_HEAD:
                out += [(c & c2, h2) for h2, c2 in Y.summands]
                sig = sig & (~c | Y.signal)
            else:
                out += [(c & g, h2) for g, h2 in self.prefix(h[1], self.seq(h[2], Y))]
        return self.mk(out, sig)

    def guard(self, phi: Cond, X: NF) -> NF:
        return self.mk([(phi & c, h) for h, c in X.summands], ~phi | X.signal)

    def emit(self, phi: Cond, X: NF) -> NF:
        return self.mk([(c, h) for h, c in X.summands], phi & X.signal)

    def encap(self, H: frozenset, X: NF) -> NF:
        out = []
        for h, c in X.summands:
            if h == EPS_HEAD:
                out.append((c, h))
            elif h[1] not in H:
                out += [(c & g, h2) for g, h2 in self.prefix(h[1], self.encap(H, h[2]))]
        return self.mk(out, X.signal)

    def term_part(self, X: NF) -> NF:
        """The encapsulation of all actions: only the termination summand survives."""
        return self.mk([(c, h) for h, c in X.summands if h == EPS_HEAD], X.signal)

    def par(self, X: NF, Y: NF) -> NF:
        parts = [self.leftm(X, Y), self.leftm(Y, X), self.comm(X, Y),
                 self.seq(self.term_part(X), self.term_part(Y))]
        out, sig = [], TOP
        for P in parts:
            out += [(c, h) for h, c in P.summands]
            sig = sig & P.signal
        return self.mk(out, sig)

    def leftm(self, X: NF, Y: NF) -> NF:
        Yr = self.map_levels(Y, lambda k, c: retro_shift(k, c)) if self.retro else Y
        out = []
        for h, c in X.summands:
            if h != EPS_HEAD:  # TM2 for the empty summand
                out += [(c & g, h2) for g, h2 in self.prefix(h[1], self.par(h[2], Yr))]
        R = self.mk(out, X.signal & Y.signal)
        if self.signals:
            R = self.alt(R, self.term_part(Y))  # CM2ST / CM3S / GC8S
        return R

    def comm(self, X: NF, Y: NF) -> NF:
        out = []
        for h1, c1 in X.summands:
            for h2, c2 in Y.summands:
                if h1 == EPS_HEAD or h2 == EPS_HEAD:
                    continue  # TM5 / TM6
                g = self.cfg.gamma_of(h1[1], h2[1])
                if g == DELTA_NAME:
                    continue
                x2, y2 = h1[2], h2[2]
                if self.ex:  # CM7J
                    x2 = self.map_levels(x2, lambda k, c, a=h1[1]: last_action_update(a, k, c))
                    y2 = self.map_levels(y2, lambda k, c, b=h2[1]: last_action_update(b, k, c))
                out += [(c1 & c2 & g2, hh) for g2, hh in self.prefix(g, self.par(x2, y2))]
        R = self.mk(out, X.signal & Y.signal)
        if self.signals:
            R = self.alt(R, self.alt(self.term_part(X), self.term_part(Y)))  # GC9S / GC10S
        return R

    def map_levels(self, X: NF, f) -> NF:
        """Apply f(level, cond) to every condition, level counting the enclosing prefixes."""
        return self._map_levels(X, f, 0)

    def _map_levels(self, X: NF, f, k: int) -> NF:
        out = []
        for h, c in X.summands:
            c2 = f(k, c)
            if h == EPS_HEAD:
                out.append((c2, h))
            else:
                inner = self._map_levels(h[2], f, k + 1)
                out += [(c2 & g, h2) for g, h2 in self.prefix(h[1], inner)]
        return self.mk(out, f(k, X.signal) if self.signals else TOP)

    def cond_eval(self, h, X: NF, general: bool) -> NF:
        out = []
        for hd, c in X.summands:
            c2 = retro_update(h, 0, c) if self.retro else apply_endo(h, c)
            if hd == EPS_HEAD:
                out.append((c2, hd))
                continue
            a, X2 = hd[1], hd[2]
            if self.retro:
                X2 = self.map_levels(X2, lambda k, cc: retro_update(h, k + 1, cc))
            h2 = self.cfg.eff_gce_of(a, h) if general else h
            out += [(c2 & g, h3) for g, h3 in self.prefix(a, self.cond_eval(h2, X2, general))]
        return self.mk(out, X.signal)

    def state_op(self, s: str, X: NF) -> NF:
        tab = self.cfg.state_ops
        if tab is None:
            raise VariantError("state operator used without state tables")
        ev = tab.eval[s]
        out = []
        for hd, c in X.summands:
            c2 = apply_endo(ev, c)
            if hd == EPS_HEAD:
                out.append((c2, hd))
                continue
            a2 = tab.act_of(hd[1], s)
            if a2 == DELTA_NAME:
                continue
            inner = self.state_op(tab.eff_of(hd[1], s), hd[2])
            out += [(c2 & g, h3) for g, h3 in self.prefix(a2, inner)]
        return self.mk(out, X.signal)

    # -------------------------------------------------------- terms

    def normalize(self, t: Term) -> NF:
        r = self.memo.get(t)
        if r is None:
            r = self._norm(t)
            self.memo[t] = r
        return r

    def _norm(self, t: Term) -> NF:
        k = type(t)
        n = self.normalize
        if k is Deadlock:
            return DELTA_NF
        if k is Empty:
            return EPS_NF
        if k is Inaccessible:
            return NEX_NF
        if k is Action:
            return self.mk(self.prefix(t.name, EPS_NF))
        if k is Alt:
            return self.alt(n(t.left), n(t.right))
        if k is Seq:
            return self.seq(n(t.left), n(t.right))
        if k is Guard:
            return self.guard(t.cond, n(t.body))
        if k is Emit:
            return self.emit(t.cond, n(t.body))
        if k is Par:
            return self.par(n(t.left), n(t.right))
        if k is LeftMerge:
            return self.leftm(n(t.left), n(t.right))
        if k is CommMerge:
            return self.comm(n(t.left), n(t.right))
        if k is Encap:
            return self.encap(t.H, n(t.body))
        if k is CondEval or k is GenCondEval:
            return self.cond_eval(t.h, n(t.body), k is GenCondEval)
        if k is StateOp:
            return self.state_op(t.s, n(t.body))
        if k is RetroShift0 or k is RetroShiftN:
            m = 0 if k is RetroShift0 else t.n
            return self.map_levels(n(t.body), lambda lv, c: retro_shift(m + lv, c))
        if k is RetroUpdate:
            return self.map_levels(n(t.body), lambda lv, c: retro_update(t.h, t.n + lv, c))
        if k is LastActionUpdate:
            return self.map_levels(n(t.body), lambda lv, c: last_action_update(t.a, t.n + lv, c))
        if k is RecConst:
            raise RequiresUnfoldingError(f"requires-unfolding: recursion constant <{t.var}|{t.spec.name}>")
        if k is Var:
            raise AcpError(f"open term: free variable {t.name}")
        raise TypeError(f"not a term: {t!r}")


def _at_most_one(sigma: dict) -> bool:
    seen = set()
    for x, v in sigma.items():
        if v and just_action(x.name) is not None:
            if x.depth in seen:
                return False
            seen.add(x.depth)
    return True


# ---------------------------------------------------------------- back to terms

def nf_to_term(X: NF) -> Term:
    if X.signal.is_bot:
        return NEX
    parts = []
    for h, c in X.summands:
        body = EPS if h == EPS_HEAD else _prefix_term(h[1], h[2])
        parts.append(body if c.is_top else Guard(c, body))
    if not parts:
        t: Term = DELTA
    else:
        t = parts[-1]
        for p in reversed(parts[:-1]):
            t = Alt(p, t)
    return t if X.signal.is_top else Emit(X.signal, t)


def _prefix_term(a: str, X: NF) -> Term:
    if X == EPS_NF:
        return Action(a)
    return Seq(Action(a), nf_to_term(X))


# ---------------------------------------------------------------- public API

_rewriters: dict[int, tuple[AlgebraConfig, Rewriter]] = {}


def rewriter(cfg: AlgebraConfig) -> Rewriter:
    hit = _rewriters.get(id(cfg))
    if hit is None or hit[0] is not cfg:
        if len(_rewriters) > 64:
            _rewriters.clear()
        hit = (cfg, Rewriter(cfg))
        _rewriters[id(cfg)] = hit
    return hit[1]


def normal_form(t: Term, cfg: AlgebraConfig) -> NF:
    check_variant(t, cfg)
    return rewriter(cfg).normalize(t)


def normalize(t: Term, cfg: AlgebraConfig) -> Term:
    return nf_to_term(normal_form(t, cfg))


def nf_equal(X: NF, Y: NF, exclusive: bool = False) -> bool:
    if not exclusive:
        return X == Y
    if X.signal != Y.signal:
        return False
    hx, hy = X.heads(), Y.heads()
    if set(hx) != set(hy):
        return False
    return all(leq(hx[h], hy[h], True) and leq(hy[h], hx[h], True) for h in hx)


def eq_axiomatic(p: Term, q: Term, cfg: AlgebraConfig) -> str:
    X, Y = normal_form(p, cfg), normal_form(q, cfg)
    return EQUAL if nf_equal(X, Y, cfg.exclusive) else NOT_PROVED


def substitute_eval(p: Term, assignment: dict, cfg: AlgebraConfig | None = None) -> Term:
    """Replace every atom in every guard by its truth value under a total assignment."""
    if cfg is not None and cfg.variant != "acpec":
        raise VariantError("substitute_eval is defined for the plain variant")
    from .terms import iter_subterms, map_children

    used = set()
    for s in iter_subterms(p):
        if isinstance(s, (Guard, Emit)):
            used |= {x.name for x in support(s.cond)}
        if isinstance(s, (RetroShift0, RetroShiftN, RetroUpdate, LastActionUpdate, RecConst)):
            raise VariantError("substitute_eval takes closed plain terms")
    missing = used - set(assignment)
    if missing:
        raise DeclarationError(f"partial assignment: no value for {', '.join(sorted(missing))}")

    def val(x: Atom):
        return TOP if assignment[x.name] else BOT

    def go(t: Term) -> Term:
        t = map_children(t, go)
        if isinstance(t, Guard):
            c = substitute(t.cond, val)
            return t.body if c.is_top else DELTA if c.is_bot else Guard(c, t.body)
        return t

    return go(p)
