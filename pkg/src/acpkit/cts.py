"""Conditional transition systems and the model-level operations on them."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable

from .conditions import (
    BOT,
    TOP,
    Cond,
    Endo,
    apply_endo,
    format_cond,
    is_bot,
    last_action_update,
    parse_cond,
    retro_shift,
    sort_key,
    sup,
)
from .errors import AcyclicityError, VariantError
from .terms import DELTA_NAME, AlgebraConfig

State = Hashable


@dataclass
class Cts:
    states: list
    init: State
    trans: list  # (src, cond, act, dst)
    term: list  # (state, cond)
    sgn: dict | None = None
    retro: bool = False
    variant: str = "acpec"
    exhausted: bool = False
    _out: dict | None = field(default=None, repr=False, compare=False)
    _terms: dict | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.trans = list(dict.fromkeys(self.trans))
        self.term = list(dict.fromkeys(self.term))

    def out(self, s: State) -> list[tuple[Cond, str, State]]:
        if self._out is None:
            self._out = {x: [] for x in self.states}
            for a, c, act, b in self.trans:
                self._out[a].append((c, act, b))
        return self._out.get(s, [])

    def terms(self, s: State) -> list[Cond]:
        if self._terms is None:
            self._terms = {x: [] for x in self.states}
            for a, c in self.term:
                self._terms[a].append(c)
        return self._terms.get(s, [])

    def signal(self, s: State) -> Cond:
        return TOP if self.sgn is None else self.sgn[s]

    def term_sup(self, s: State) -> Cond:
        return sup(self.terms(s))

    def is_acyclic(self) -> bool:
        color: dict = {}
        for root in self.states:
            if root in color:
                continue
            stack = [(root, iter(self.out(root)))]
            color[root] = 1
            while stack:
                s, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[s] = 2
                    stack.pop()
                    continue
                t = nxt[2]
                if color.get(t) == 1:
                    return False
                if t not in color:
                    color[t] = 1
                    stack.append((t, iter(self.out(t))))
        return True

    def actions(self) -> set[str]:
        return {a for _, _, a, _ in self.trans}

    def renumbered(self) -> "Cts":
        """Same system with states 0..n-1 in breadth-first order from init."""
        order = _bfs_order(self)
        idx = {s: i for i, s in enumerate(order)}
        trans = [(idx[a], c, act, idx[b]) for a, c, act, b in self.trans if a in idx and b in idx]
        term = [(idx[s], c) for s, c in self.term if s in idx]
        sgn = None if self.sgn is None else {idx[s]: v for s, v in self.sgn.items() if s in idx}
        return Cts(list(range(len(order))), 0, trans, term, sgn, self.retro, self.variant, self.exhausted)


def _bfs_order(T: Cts) -> list:
    seen = {T.init: None}
    q = deque([T.init])
    while q:
        s = q.popleft()
        outs = sorted(T.out(s), key=lambda x: (x[1], sort_key(x[0])))
        for _, _, t in outs:
            if t not in seen:
                seen[t] = None
                q.append(t)
    rest = [s for s in T.states if s not in seen]
    return list(seen) + rest


def make_cts(init, trans, term, sgn=None, retro=False, variant="acpec", exhausted=False) -> Cts:
    """Build a system from raw relations (states inferred), dropping false labels."""
    trans = [(a, c, x, b) for a, c, x, b in trans if not c.is_bot]
    term = [(s, c) for s, c in term if not c.is_bot]
    states = list(dict.fromkeys([init] + [a for a, *_ in trans] + [t[3] for t in trans] + [s for s, _ in term]
                                + (list(sgn) if sgn else [])))
    if sgn is not None:
        sgn = {s: sgn.get(s, TOP) for s in states}
    return Cts(states, init, trans, term, sgn, retro, variant, exhausted)


# ---------------------------------------------------------------- JSON

def cts_to_json(T: Cts, relation: list | None = None) -> dict:
    R = T.renumbered()
    trans = sorted(
        ({"from": a, "cond": format_cond(c), "act": x, "to": b} for a, c, x, b in R.trans),
        key=lambda d: (d["from"], d["act"], d["to"], d["cond"]),
    )
    term = sorted(({"state": s, "cond": format_cond(c)} for s, c in R.term), key=lambda d: (d["state"], d["cond"]))
    out: dict[str, Any] = {"variant": R.variant, "states": R.states, "init": R.init, "trans": trans, "term": term}
    if R.sgn is not None:
        out["sgn"] = {str(s): format_cond(R.sgn[s]) for s in R.states}
    if R.retro:
        out["retro"] = True
    if R.exhausted:
        out["exhausted"] = True
    if relation is not None:
        out["relation"] = relation
    return out


def dump_cts(T: Cts) -> str:
    return json.dumps(cts_to_json(T), sort_keys=False)


def load_cts(data: str | dict) -> Cts:
    d = json.loads(data) if isinstance(data, str) else data
    trans = [(t["from"], parse_cond(t["cond"]), t["act"], t["to"]) for t in d["trans"]]
    term = [(t["state"], parse_cond(t["cond"])) for t in d["term"]]
    sgn = None
    if "sgn" in d:
        sgn = {int(k) if k.lstrip("-").isdigit() else k: parse_cond(v) for k, v in d["sgn"].items()}
    return Cts(list(d["states"]), d["init"], trans, term, sgn, bool(d.get("retro", False)),
               d.get("variant", "acpec"), bool(d.get("exhausted", False)))


def to_dot(T: Cts) -> str:
    R = T.renumbered()
    lines = ["digraph cts {", "  node [shape=circle];", f"  start [shape=point]; start -> {R.init};"]
    for s in R.states:
        extra = [format_cond(c) for c in R.terms(s)]
        label = str(s) if not extra else f"{s}\\n↓ " + " | ".join(extra)
        if R.sgn is not None:
            label += f"\\nsgn {format_cond(R.sgn[s])}"
        lines.append(f'  {s} [label="{label}"];')
    for a, c, x, b in R.trans:
        lines.append(f'  {a} -> {b} [label="{format_cond(c)}, {x}"];')
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------- basics

def conn(T: Cts) -> Cts:
    seen = {T.init: None}
    q = deque([T.init])
    while q:
        s = q.popleft()
        for _, _, t in T.out(s):
            if t not in seen:
                seen[t] = None
                q.append(t)
    states = [s for s in T.states if s in seen]
    trans = [t for t in T.trans if t[0] in seen]
    term = [t for t in T.term if t[0] in seen]
    sgn = None if T.sgn is None else {s: T.sgn[s] for s in states}
    return Cts(states, T.init, trans, term, sgn, T.retro, T.variant, T.exhausted)


def restrict_signals(T: Cts) -> Cts:
    """Drop moves from or to false-signal states and terminations at them."""
    if T.sgn is None:
        return T
    dead = {s for s in T.states if T.sgn[s].is_bot}
    trans = [t for t in T.trans if t[0] not in dead and t[3] not in dead]
    term = [t for t in T.term if t[0] not in dead]
    return conn(Cts(T.states, T.init, trans, term, T.sgn, T.retro, T.variant, T.exhausted))


def ts_delta(variant="acpec", signals=False) -> Cts:
    return Cts([0], 0, [], [], {0: TOP} if signals else None, variant.startswith("acpecr"), variant)


def ts_eps(variant="acpec", signals=False) -> Cts:
    return Cts([0], 0, [], [(0, TOP)], {0: TOP} if signals else None, variant.startswith("acpecr"), variant)


def ts_act(a: str, variant="acpec", signals=False) -> Cts:
    if a == DELTA_NAME:
        return ts_delta(variant, signals)
    return Cts([0, 1], 0, [(0, TOP, a, 1)], [(1, TOP)], {0: TOP, 1: TOP} if signals else None,
               variant.startswith("acpecr"), variant)


def ts_nex(variant="acpecs") -> Cts:
    return Cts([0], 0, [], [], {0: BOT}, False, variant)


# ---------------------------------------------------------------- isomorphism

def iso_check(T1: Cts, T2: Cts) -> dict | None:
    if len(T1.states) != len(T2.states) or len(T1.trans) != len(T2.trans) or len(T1.term) != len(T2.term):
        return None
    if (T1.sgn is None) != (T2.sgn is None):
        return None

    def sig(T, s):
        outs = sorted((x, sort_key(c)) for c, x, _ in T.out(s))
        terms = sorted(sort_key(c) for c in T.terms(s))
        return (tuple(outs), tuple(terms), None if T.sgn is None else sort_key(T.sgn[s]))

    sig1 = {s: sig(T1, s) for s in T1.states}
    sig2 = {s: sig(T2, s) for s in T2.states}
    trans2 = set((a, c, x, b) for a, c, x, b in T2.trans)
    m: dict = {}
    used: set = set()

    def consistent(s1, s2):
        for c, x, t1 in T1.out(s1):
            if t1 in m and (s2, c, x, m[t1]) not in trans2:
                return False
        for u1, c, x, v1 in T1.trans:
            if v1 == s1 and u1 in m and (m[u1], c, x, s2) not in trans2:
                return False
        return True

    order = _bfs_order(T1)

    def search(i):
        if i == len(order):
            return True
        s1 = order[i]
        for s2 in T2.states:
            if s2 in used or sig1[s1] != sig2[s2]:
                continue
            if i == 0 and s2 != T2.init:
                continue
            if i > 0 and s1 == T1.init:
                continue
            if not consistent(s1, s2):
                continue
            m[s1] = s2
            used.add(s2)
            if search(i + 1):
                return True
            del m[s1]
            used.discard(s2)
        return False

    if order[0] != T1.init:
        return None
    return dict(m) if search(0) else None


# ---------------------------------------------------------------- binary constructions

def _check_pair(T1: Cts, T2: Cts) -> bool:
    if (T1.sgn is None) != (T2.sgn is None) or T1.retro != T2.retro:
        raise VariantError("operands of a model construction must have the same variant")
    return T1.sgn is not None


def _nonbot(c: Cond, exclusive: bool = False) -> bool:
    return not is_bot(c, exclusive)


def ts_combine(tag: str, T1: Cts, T2: Cts, cfg: AlgebraConfig, literal: bool = False) -> Cts:
    signals = _check_pair(T1, T2)
    if tag == "alt":
        R = _alt(T1, T2, signals)
    elif tag == "seq":
        R = _seq_literal(T1, T2) if literal else _seq(T1, T2, signals)
    elif tag in ("par", "leftm", "comm"):
        R = _par(tag, T1, T2, cfg, signals)
    else:
        raise ValueError(f"unknown construction {tag!r}")
    R.variant = T1.variant
    R.retro = T1.retro
    return restrict_signals(R) if signals else conn(R)


def _alt(T1, T2, signals):
    s0 = ("init",)
    trans = [(s0, c, a, ("L", t)) for c, a, t in T1.out(T1.init)]
    trans += [(s0, c, a, ("R", t)) for c, a, t in T2.out(T2.init)]
    trans += [(("L", a), c, x, ("L", b)) for a, c, x, b in T1.trans]
    trans += [(("R", a), c, x, ("R", b)) for a, c, x, b in T2.trans]
    term = [(s0, c) for c in T1.terms(T1.init) + T2.terms(T2.init)]
    term += [(("L", s), c) for s, c in T1.term] + [(("R", s), c) for s, c in T2.term]
    sgn = None
    if signals:
        sgn = {s0: T1.sgn[T1.init] & T2.sgn[T2.init]}
        sgn.update({("L", s): v for s, v in T1.sgn.items()})
        sgn.update({("R", s): v for s, v in T2.sgn.items()})
    return make_cts(s0, trans, term, sgn)


def _seq(T1, T2, signals):
    """Sequential composition: every terminating state of T1 also offers T2's first moves."""
    trans = [(("L", a), c, x, ("L", b)) for a, c, x, b in T1.trans]
    term = []
    first = T2.out(T2.init)
    fin2 = T2.terms(T2.init)
    for s in T1.states:
        for beta in T1.terms(s):
            for c, x, t in first:
                trans.append((("L", s), beta & c, x, ("R", t)))
            for c in fin2:
                term.append((("L", s), beta & c))
    trans += [(("R", a), c, x, ("R", b)) for a, c, x, b in T2.trans]
    term += [(("R", s), c) for s, c in T2.term]
    sgn = None
    if signals:
        s2 = T2.sgn[T2.init]
        sgn = {("L", s): v & (~T1.term_sup(s) | s2) for s, v in T1.sgn.items()}
        sgn.update({("R", s): v for s, v in T2.sgn.items()})
    return make_cts(("L", T1.init), trans, term, sgn)


def _seq_literal(T1, T2):
    """The gluing construction exactly as stated in the source definition."""
    fin1 = {s for s in T1.states if T1.terms(s)}
    g = ("R", T2.init)
    trans = []
    for a, c, x, b in T1.trans:
        trans.append((("L", a), c, x, g if b in fin1 else ("L", b)))
    for s in fin1:
        for beta in T1.terms(s):
            for c, x, t in T2.out(T2.init):
                trans.append((g, beta & c, x, ("R", t)))
    trans += [(("R", a), c, x, ("R", b)) for a, c, x, b in T2.trans if a != T2.init]
    term = [(g, beta & c) for s in fin1 for beta in T1.terms(s) for c in T2.terms(T2.init)]
    term += [(("R", s), c) for s, c in T2.term if s != T2.init]
    return make_cts(("L", T1.init), trans, term)


def _par(tag, T1, T2, cfg, signals):
    ex = cfg.exclusive
    trans = []
    pairs = [(s1, s2) for s1 in T1.states for s2 in T2.states]
    for s1, s2 in pairs:
        o1, o2 = T1.out(s1), T2.out(s2)
        for c, x, t in o1:
            trans.append(((s1, s2), c, x, (t, s2)))
        for c, x, t in o2:
            trans.append(((s1, s2), c, x, (s1, t)))
        for c1, x1, t1 in o1:
            for c2, x2, t2 in o2:
                g = cfg.gamma_of(x1, x2)
                c = c1 & c2
                if g != DELTA_NAME and _nonbot(c, ex):
                    trans.append(((s1, s2), c, g, (t1, t2)))
    term = [((s1, s2), a & b) for s1, s2 in pairs for a in T1.terms(s1) for b in T2.terms(s2)]
    term = [t for t in term if _nonbot(t[1], ex)]
    sgn = None
    if signals:
        sgn = {(s1, s2): T1.sgn[s1] & T2.sgn[s2] for s1, s2 in pairs}
    s0 = (T1.init, T2.init)
    if tag == "par":
        return make_cts(s0, trans, term, sgn)
    fresh = ("init",)
    if tag == "leftm":
        first = [(fresh, c, x, (t, T2.init)) for c, x, t in T1.out(T1.init)]
    else:
        first = []
        for c1, x1, t1 in T1.out(T1.init):
            for c2, x2, t2 in T2.out(T2.init):
                g = cfg.gamma_of(x1, x2)
                if g != DELTA_NAME and _nonbot(c1 & c2, ex):
                    first.append((fresh, c1 & c2, g, (t1, t2)))
    if sgn is not None:
        sgn[fresh] = sgn[s0]
    return make_cts(fresh, first + trans, term, sgn)


# ---------------------------------------------------------------- unary constructions

def ts_unary(tag: str, T: Cts, cfg: AlgebraConfig | None = None, arg: Any = None) -> Cts:
    signals = T.sgn is not None
    if tag == "guard":
        return _guard(T, arg, signals)
    if tag == "encap":
        H = frozenset(arg)
        R = Cts(T.states, T.init, [t for t in T.trans if t[2] not in H], T.term, T.sgn, T.retro, T.variant)
        return conn(R)
    if tag == "emit":
        if not signals:
            raise VariantError("emission needs a system with signals")
        return _emit(T, arg)
    if tag == "translate":
        return _translate(T, arg)
    raise ValueError(f"unknown construction {tag!r}")


def _fresh_init(T: Cts):
    """Copy of the initial state without incoming moves, so it can be relabelled alone."""
    s0 = ("init",)
    trans = [(s0, c, x, ("o", t)) for c, x, t in T.out(T.init)]
    trans += [(("o", a), c, x, ("o", b)) for a, c, x, b in T.trans]
    term = [(s0, c) for c in T.terms(T.init)] + [(("o", s), c) for s, c in T.term]
    sgn = None
    if T.sgn is not None:
        sgn = {s0: T.sgn[T.init]}
        sgn.update({("o", s): v for s, v in T.sgn.items()})
    return s0, trans, term, sgn


def _guard(T, alpha: Cond, signals):
    s0, trans, term, sgn = _fresh_init(T)
    trans = [(a, alpha & c if a == s0 else c, x, b) for a, c, x, b in trans]
    term = [(s, alpha & c if s == s0 else c) for s, c in term]
    if sgn is not None:
        sgn[s0] = ~alpha | sgn[s0]
    R = make_cts(s0, trans, term, sgn, T.retro, T.variant)
    return restrict_signals(R) if signals else conn(R)


def _emit(T, alpha: Cond):
    s0, trans, term, sgn = _fresh_init(T)
    sgn[s0] = alpha & sgn[s0]
    return restrict_signals(make_cts(s0, trans, term, sgn, T.retro, T.variant))


def _translate(T, h: Endo):
    trans = [(a, apply_endo(h, c), x, b) for a, c, x, b in T.trans]
    term = [(s, apply_endo(h, c)) for s, c in T.term]
    sgn = None if T.sgn is None else {s: apply_endo(h, v) for s, v in T.sgn.items()}
    R = make_cts(T.init, trans, term, sgn, T.retro, T.variant)
    return restrict_signals(R) if sgn is not None else conn(R)


# ---------------------------------------------------------------- unfolding and retrospection

def ts_unfold(T: Cts, bound: int | None = None) -> Cts:
    """States are paths (tuples s0, (cond, act), s1, ...)."""
    if bound is None and not T.is_acyclic():
        raise AcyclicityError("requires-acyclic-or-bound: the system has a cycle")
    root = (T.init,)
    states, trans, term = [root], [], []
    q = deque([root])
    exhausted = T.exhausted
    while q:
        p = q.popleft()
        s = p[-1]
        for c in T.terms(s):
            term.append((p, c))
        if bound is not None and path_len(p) >= bound:
            if T.out(s):
                exhausted = True
            continue
        for c, x, t in T.out(s):
            p2 = p + ((c, x), t)
            states.append(p2)
            trans.append((p, c, x, p2))
            q.append(p2)
    sgn = None if T.sgn is None else {p: T.sgn[p[-1]] for p in states}
    return Cts(states, root, trans, term, sgn, T.retro, T.variant, exhausted)


def path_len(p: tuple) -> int:
    return (len(p) - 1) // 2


def nr_i(i: int, p: tuple) -> int:
    """Steps of a product path in which component i (1 or 2) moved."""
    n = 0
    for k in range(0, len(p) - 2, 2):
        if p[k][i - 1] != p[k + 2][i - 1]:
            n += 1
    return n


def upd(i: int, alpha: Cond, p: tuple, exclusive: bool = False) -> Cond:
    """Adapt retrospection of a condition of component i along a product path.

    With last-action conditions a communication step also fixes the
    component's own just-atoms, as the synchronisation axiom does.
    """
    steps = path_len(p)
    for k in range(steps):
        a, b = p[2 * k], p[2 * k + 2]
        rest = p[2 * k + 2:]
        if a[i - 1] == b[i - 1]:
            alpha = retro_shift(nr_i(i, rest), alpha)
        elif exclusive and p[2 * k + 1][0] == "s":
            alpha = last_action_update(p[2 * k + 1][4][i - 1], nr_i(i, rest), alpha)
    return alpha


def upd_both(a1: Cond, a2: Cond, p: tuple, exclusive: bool = False) -> Cond:
    return upd(1, a1, p, exclusive) & upd(2, a2, p, exclusive)


def ts_par_retro(tag: str, T1: Cts, T2: Cts, cfg: AlgebraConfig, bound: int | None = None) -> Cts:
    U1, U2 = ts_unfold(T1, bound), ts_unfold(T2, bound)
    ex = cfg.exclusive
    # product of the unfoldings, remembering how each move arose
    moves: dict = {}
    seen = {(U1.init, U2.init)}
    q = deque([(U1.init, U2.init)])
    while q:
        s1, s2 = q.popleft()
        out = []
        for c, x, t in U1.out(s1):
            out.append(("l", c, None, x, (t, s2), None))
        for c, x, t in U2.out(s2):
            out.append(("r", None, c, x, (s1, t), None))
        for c1, x1, t1 in U1.out(s1):
            for c2, x2, t2 in U2.out(s2):
                g = cfg.gamma_of(x1, x2)
                if g != DELTA_NAME and _nonbot(c1 & c2, ex):
                    out.append(("s", c1, c2, g, (t1, t2), (x1, x2)))
        moves[s1, s2] = out
        for m in out:
            if m[4] not in seen:
                seen.add(m[4])
                q.append(m[4])
    # unfold the product; path states are tuples of product states and labels
    root = ((U1.init, U2.init),)
    states, trans, term = [root], [], []
    q = deque([root])
    while q:
        p = q.popleft()
        s1, s2 = p[-1]
        top = len(p) == 1
        if not (top and tag != "par"):
            for b1 in U1.terms(s1):
                for b2 in U2.terms(s2):
                    c = upd_both(b1, b2, p, ex)
                    if _nonbot(c, ex):
                        term.append((p, c))
        for kind, c1, c2, x, tgt, acts in moves[s1, s2]:
            if top and tag == "leftm" and kind != "l":
                continue
            if top and tag == "comm" and kind != "s":
                continue
            if kind == "l":
                c = upd(1, c1, p, ex)
            elif kind == "r":
                c = upd(2, c2, p, ex)
            else:
                c = upd_both(c1, c2, p, ex)
            if not _nonbot(c, ex):
                continue
            p2 = p + ((kind, c1, c2, x, acts), tgt)
            states.append(p2)
            trans.append((p, c, x, p2))
            q.append(p2)
    R = Cts(states, root, trans, term, None, True, T1.variant, U1.exhausted or U2.exhausted)
    return conn(R)


def ts_retro_shift(n: int, T: Cts, bound: int | None = None) -> Cts:
    U = ts_unfold(T, bound)
    trans = [(a, retro_shift(path_len(a) + n, c), x, b) for a, c, x, b in U.trans]
    term = [(s, retro_shift(path_len(s) + n, c)) for s, c in U.term]
    return Cts(U.states, U.init, trans, term, None, True, T.variant, U.exhausted)
