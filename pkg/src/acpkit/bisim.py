"""Splitting bisimilarity checkers (plain, signal-observing, retrospective) and a brute-force oracle."""
from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from .conditions import (
    TOP,
    Atom,
    Cond,
    evaluate,
    format_cond,
    is_bot,
    just_action,
    just_name,
    leq,
    retro,
    sup,
    support,
    atom,
)
from .cts import Cts, _bfs_order
from .errors import OracleBoundError, VariantError

KINDS = ("plain", "signal", "retro")
ORACLE_MAX_PAIRS = 16
ORACLE_MAX_TRIPLES = 14


@dataclass
class Verdict:
    related: bool
    kind: str = "plain"
    relation: list = field(default_factory=list)  # pairs (s1, s2) or triples (s1, beta, s2)
    obligation: tuple | None = None  # (state, action or "term", residue) when not related

    @property
    def witness(self):
        return self.relation if self.related else self.obligation

    def __bool__(self):
        return self.related

    def to_json(self, T1: Cts | None = None, T2: Cts | None = None) -> dict:
        n1 = _namer(T1)
        n2 = _namer(T2)
        out: dict[str, Any] = {"related": self.related, "kind": self.kind}
        if self.related:
            rel = []
            for e in self.relation:
                if len(e) == 2:
                    rel.append([n1(e[0]), n2(e[1])])
                else:
                    rel.append([n1(e[0]), format_cond(e[1]), n2(e[2])])
            out["relation"] = sorted(rel, key=str)
        elif self.obligation is not None:
            side, s, what, residue = self.obligation
            out["obligation"] = {"side": side, "state": (n1 if side == 1 else n2)(s), "action": what,
                                 "residue": format_cond(residue)}
        return out


def _namer(T: Cts | None):
    if T is None:
        return str
    idx = {s: i for i, s in enumerate(_bfs_order(T))}
    return lambda s: idx.get(s, str(s))


# ---------------------------------------------------------------- fixpoint checkers

class _Game:
    """Greatest-fixpoint refinement over the candidate elements reachable from the initial one.

    An element is a pair of states (with a context condition for retrospection).  Each
    element carries obligations: a condition that must be covered by the conditions of
    matching moves whose successor elements are still alive.
    """

    def __init__(self, T1: Cts, T2: Cts, ctx, succ, exclusive: bool, order_seed: int | None = None):
        self.T1, self.T2 = T1, T2
        self.ctx = ctx  # element -> (s1, s2, weight) with weight the condition obligations are met with
        self.succ = succ  # (element, c1, c2, action) -> successor element or None
        self.ex = exclusive
        self.seed = order_seed

    def run(self, init, extra_check=None):
        # explore candidate elements and their obligations
        obls: dict = {}
        preds: dict = {}
        seen = {init: None}
        q = deque([init])
        while q:
            e = q.popleft()
            s1, s2, w = self.ctx(e)
            res = []
            for side, src, A, B, other in ((1, s1, self.T1, self.T2, s2), (2, s2, self.T2, self.T1, s1)):
                theirs = B.out(other)
                for c, a, t in A.out(src):
                    need = w & c
                    if is_bot(need, self.ex):
                        continue
                    ms = []
                    for c2, a2, t2 in theirs:
                        if a2 != a or is_bot(need & c2, self.ex):
                            continue
                        nxt = self.succ(e, t, t2, c, c2, a) if side == 1 else self.succ(e, t2, t, c2, c, a)
                        if nxt is None:
                            continue
                        ms.append((c2, nxt))
                        preds.setdefault(nxt, set()).add(e)
                        if nxt not in seen:
                            seen[nxt] = None
                            q.append(nxt)
                    res.append((side, src, a, need, ms))
                for c in A.terms(src):
                    need = w & c
                    if not is_bot(need, self.ex):
                        res.append((side, src, "term", need, [(c2, None) for c2 in B.terms(other)]))
            obls[e] = res
        alive = set(seen)
        why: dict = {}

        def failing(e):
            if extra_check is not None:
                r = extra_check(e)
                if r is not None:
                    return r
            for side, s, a, need, ms in obls[e]:
                cover = sup(c for c, nxt in ms if nxt is None or nxt in alive)
                if not leq(need, cover, self.ex):
                    return (side, s, a, need & ~cover)
            return None

        work = list(seen)
        if self.seed is not None:
            random.Random(self.seed).shuffle(work)
        work = deque(work)
        queued = set(work)
        while work:
            e = work.popleft()
            queued.discard(e)
            if e not in alive:
                continue
            r = failing(e)
            if r is None:
                continue
            alive.discard(e)
            why[e] = r
            for p in preds.get(e, ()):
                if p in alive and p not in queued:
                    work.append(p)
                    queued.add(p)
        if init not in alive:
            return False, why[init], None
        # keep only what is reachable from init inside the relation
        keep = {init}
        q = deque([init])
        while q:
            e = q.popleft()
            for *_, ms in obls[e]:
                for _, nxt in ms:
                    if nxt is not None and nxt in alive and nxt not in keep:
                        keep.add(nxt)
                        q.append(nxt)
        return True, None, sorted(keep, key=repr)


def split_bisim(T1: Cts, T2: Cts, order_seed: int | None = None) -> Verdict:
    g = _Game(T1, T2, lambda e: (e[0], e[1], TOP), lambda e, t1, t2, c1, c2, a: (t1, t2), False, order_seed)
    ok, why, rel = g.run((T1.init, T2.init))
    return Verdict(ok, "plain", rel or [], why)


def sig_split_bisim(T1: Cts, T2: Cts, order_seed: int | None = None) -> Verdict:
    if T1.sgn is None or T2.sgn is None:
        raise VariantError("signal-observing bisimilarity needs systems with signals")
    g = _Game(T1, T2, lambda e: (e[0], e[1], T1.sgn[e[0]]), lambda e, t1, t2, c1, c2, a: (t1, t2),
              False, order_seed)

    def same_signal(e):
        s1, s2 = e
        if T1.sgn[s1] != T2.sgn[s2]:
            x, y = T1.sgn[s1], T2.sgn[s2]
            return (1, s1, "signal", (x & ~y) | (~x & y))
        return None

    ok, why, rel = g.run((T1.init, T2.init), same_signal)
    return Verdict(ok, "signal", rel or [], why)


def retro_successor(c1: Cond, c2: Cond, a: str, mode: str = "plain", literal: bool = False,
                    side: int = 1) -> Cond:
    """Context condition after a matched step; literal uses only the covering move's label."""
    if literal:
        base = retro(c2 if side == 1 else c1)
    else:
        base = retro(c1 & c2)
    if mode == "last_action":
        base = base & atom(just_name(a))
    return base


def retro_split_bisim(T1: Cts, T2: Cts, mode: str = "plain", literal: bool = False,
                      order_seed: int | None = None) -> Verdict:
    if mode not in ("plain", "last_action"):
        raise ValueError(f"unknown mode {mode!r}")
    ex = mode == "last_action"
    if literal:
        return _retro_literal(T1, T2, mode, order_seed)

    def succ(e, t1, t2, c1, c2, a):
        b = retro_successor(c1, c2, a, mode)
        return None if is_bot(b, ex) else (t1, b, t2)

    g = _Game(T1, T2, lambda e: (e[0], e[2], e[1]), succ, ex, order_seed)
    ok, why, rel = g.run((T1.init, TOP, T2.init))
    return Verdict(ok, "retro", rel or [], why)


REFINE_MAX_ATOMS = 10


def refine_labels(T: Cts, atoms, exclusive: bool = False) -> Cts:
    """Split every label into its minterms over atoms, which leaves the behaviour unchanged."""
    atoms = sorted(atoms)
    mins = []
    for bits in itertools.product((True, False), repeat=len(atoms)):
        m = TOP
        for x, b in zip(atoms, bits):
            m = m & (atom(x.name, x.depth) if b else ~atom(x.name, x.depth))
        if not is_bot(m, exclusive):
            mins.append(m)
    trans = [(s, c & m, a, t) for s, c, a, t in T.trans for m in mins if not is_bot(c & m, exclusive)]
    term = [(s, c & m) for s, c in T.term for m in mins if not is_bot(c & m, exclusive)]
    return Cts(T.states, T.init, trans, term, T.sgn, T.retro, T.variant, T.exhausted)


def refined_retro_bisim(T1: Cts, T2: Cts, mode: str = "plain", max_atoms: int = REFINE_MAX_ATOMS) -> Verdict:
    """Retrospective check on minterm-refined systems.

    A context only records the labels of the last matched step, so a fact about
    an earlier step is lost unless the labels mention it.  Refining every label
    over all atoms up to the deepest retrospection in use carries such facts
    forward.  Exponential in the atom count, hence the bound.
    """
    conds = [c for T in (T1, T2) for _, c, _, _ in T.trans] + [c for T in (T1, T2) for _, c in T.term]
    sup_atoms = set().union(*[support(c) for c in conds]) if conds else set()
    depth = max((x.depth for x in sup_atoms), default=0)
    atoms = {Atom(x.name, d) for x in sup_atoms for d in range(depth + 1)}
    if len(atoms) > max_atoms:
        raise OracleBoundError(f"refinement bound exceeded: {len(atoms)} atoms")
    ex = mode == "last_action"
    return retro_split_bisim(refine_labels(T1, atoms, ex), refine_labels(T2, atoms, ex), mode)


def _retro_literal(T1, T2, mode, order_seed):
    """Successor contexts taken from the covering move only, as in the source definition.

    Kept for documenting why the meet of both labels is used by default.
    """
    ex = mode == "last_action"
    elems, obls = _literal_obligations(T1, T2, mode)
    alive = set(elems)
    changed = True
    why = {}
    while changed:
        changed = False
        for e in sorted(alive, key=repr):
            for side, s, a, need, ms in obls[e]:
                cover = sup(c for c, nxt in ms if nxt is None or nxt in alive)
                if not leq(need, cover, ex):
                    alive.discard(e)
                    why[e] = (side, s, a, need & ~cover)
                    changed = True
                    break
    init = (T1.init, TOP, T2.init)
    if init in alive:
        return Verdict(True, "retro", sorted(alive, key=repr), None)
    return Verdict(False, "retro", [], why[init])


def _literal_obligations(T1, T2, mode):
    ex = mode == "last_action"
    init = (T1.init, TOP, T2.init)
    seen = {init: None}
    q = deque([init])
    obls = {}
    while q:
        e = q.popleft()
        s1, b, s2 = e
        res = []
        for side, src, T, U, s_other in ((1, s1, T1, T2, s2), (2, s2, T2, T1, s1)):
            for c, a, t in T.out(src):
                need = c & b
                if is_bot(need, ex):
                    continue
                ms = []
                for c2, a2, t2 in U.out(s_other):
                    if a2 != a:
                        continue
                    nb = retro(c2)
                    if mode == "last_action":
                        nb = nb & atom(just_name(a))
                    nxt = (t, nb, t2) if side == 1 else (t2, nb, t)
                    ms.append((c2, nxt))
                    if nxt not in seen:
                        seen[nxt] = None
                        q.append(nxt)
                res.append((side, src, a, need, ms))
            for c in T.terms(src):
                need = c & b
                if not is_bot(need, ex):
                    res.append((side, src, "term", need, [(c2, None) for c2 in U.terms(s_other)]))
        obls[e] = res
    return list(seen), obls


def bisim(kind: str, T1: Cts, T2: Cts, mode: str = "plain") -> Verdict:
    if kind == "plain":
        return split_bisim(T1, T2)
    if kind == "signal":
        return sig_split_bisim(T1, T2)
    if kind == "retro":
        return retro_split_bisim(T1, T2, mode)
    raise ValueError(f"unknown bisimilarity kind {kind!r}")


# ---------------------------------------------------------------- witness validation

def validate_witness(kind: str, T1: Cts, T2: Cts, relation: list, mode: str = "plain") -> bool:
    """Check a relation against the definition clause by clause."""
    ex = kind == "retro" and mode == "last_action"
    R = set(relation)
    if kind == "retro":
        if (T1.init, TOP, T2.init) not in R:
            return False
    elif (T1.init, T2.init) not in R:
        return False
    for e in R:
        if kind == "retro":
            s1, b, s2 = e
        else:
            s1, s2 = e
            b = TOP
            if kind == "signal":
                if T1.sgn[s1] != T2.sgn[s2]:
                    return False
                b = T1.sgn[s1]
        for side in (1, 2):
            A, B = (T1, T2) if side == 1 else (T2, T1)
            sa, sb = (s1, s2) if side == 1 else (s2, s1)
            for c, a, t in A.out(sa):
                cover = []
                for c2, a2, t2 in B.out(sb):
                    if a2 != a:
                        continue
                    if kind == "retro":
                        c1_, c2_ = (c, c2) if side == 1 else (c2, c)
                        nb = retro_successor(c1_, c2_, a, mode)
                        nxt = (t, nb, t2) if side == 1 else (t2, nb, t)
                        if nxt in R:
                            cover.append(c2)
                    else:
                        nxt = (t, t2) if side == 1 else (t2, t)
                        if nxt in R:
                            cover.append(c2)
                if not leq(b & c, sup(cover), ex):
                    return False
            for c in A.terms(sa):
                if not leq(b & c, sup(B.terms(sb)), ex):
                    return False
    return True


# ---------------------------------------------------------------- brute-force oracle

class _Valuations:
    """Conditions as bitmasks over all valuations of a finite atom set."""

    def __init__(self, atoms, exclusive: bool):
        self.atoms = sorted(atoms)
        vals = []
        for bits in itertools.product((False, True), repeat=len(self.atoms)):
            v = dict(zip(self.atoms, bits))
            if exclusive and not _amo(v):
                continue
            vals.append(v)
        self.vals = vals
        self.full = (1 << len(vals)) - 1
        self._cache: dict = {}

    def mask(self, c: Cond) -> int:
        m = self._cache.get(c)
        if m is None:
            m = 0
            for i, v in enumerate(self.vals):
                if evaluate(c, v):
                    m |= 1 << i
            self._cache[c] = m
        return m


def _amo(v: dict) -> bool:
    by_depth: dict = {}
    for a, on in v.items():
        if on and just_action(a.name) is not None:
            by_depth[a.depth] = by_depth.get(a.depth, 0) + 1
    return all(n <= 1 for n in by_depth.values())


def oracle_bisim(kind: str, T1: Cts, T2: Cts, mode: str = "plain") -> Verdict:
    """Enumerate every candidate relation containing the initial element and test the clauses.

    Conditions are compared as sets of valuations, so no decision diagram reasoning is involved.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown bisimilarity kind {kind!r}")
    if kind == "retro":
        return _oracle_retro(T1, T2, mode)
    if len(T1.states) * len(T2.states) > ORACLE_MAX_PAIRS:
        raise OracleBoundError(f"oracle bound exceeded: {len(T1.states)}x{len(T2.states)} state pairs")
    conds = [c for T in (T1, T2) for _, c, _, _ in T.trans] + [c for T in (T1, T2) for _, c in T.term]
    if kind == "signal":
        conds += list(T1.sgn.values()) + list(T2.sgn.values())
    V = _Valuations(set().union(*[support(c) for c in conds]) if conds else set(), False)
    init = (T1.init, T2.init)
    elems = [init] + [(a, b) for a in T1.states for b in T2.states if (a, b) != init]

    def ctx(e):
        if kind == "signal":
            return V.mask(T1.sgn[e[0]])
        return V.full

    def pre_ok(e):
        return kind != "signal" or V.mask(T1.sgn[e[0]]) == V.mask(T2.sgn[e[1]])

    def succ(e, t1, t2, c1, c2, a):
        return (t1, t2)

    return _enumerate(kind, T1, T2, V, elems, ctx, pre_ok, succ, lambda e: (e[0], e[1]))


def _oracle_retro(T1: Cts, T2: Cts, mode: str) -> Verdict:
    if len(T1.states) > 4 or len(T2.states) > 4:
        raise OracleBoundError("oracle bound exceeded: retrospective oracle takes at most 4 states per side")
    ex = mode == "last_action"
    init = (T1.init, TOP, T2.init)
    # context conditions generated by matched steps
    betas = {TOP}
    for _, c1, a1, _ in T1.trans:
        for _, c2, a2, _ in T2.trans:
            if a1 == a2:
                betas.add(retro_successor(c1, c2, a1, mode))
    conds = [c for T in (T1, T2) for _, c, _, _ in T.trans] + [c for T in (T1, T2) for _, c in T.term]
    atoms: set[Atom] = set()
    for c in conds + list(betas):
        atoms |= support(c)
    if ex:
        for T in (T1, T2):
            for _, _, a, _ in T.trans:
                atoms.add(Atom(just_name(a), 0))
    if len(atoms) > 8:
        raise OracleBoundError("oracle bound exceeded: too many atoms")
    V = _Valuations(atoms, ex)
    elems = [init] + sorted({(s1, b, s2) for s1 in T1.states for b in betas for s2 in T2.states} - {init},
                            key=repr)
    # only elements reachable through matched steps can ever be needed
    reach = {init}
    q = deque([init])
    while q:
        s1, b, s2 = q.popleft()
        for c1, a1, t1 in T1.out(s1):
            for c2, a2, t2 in T2.out(s2):
                if a1 == a2:
                    n = (t1, retro_successor(c1, c2, a1, mode), t2)
                    if n not in reach:
                        reach.add(n)
                        q.append(n)
    elems = [e for e in elems if e in reach]
    if len(elems) > ORACLE_MAX_TRIPLES:
        raise OracleBoundError(f"oracle bound exceeded: {len(elems)} candidate triples")

    def succ(e, t1, t2, c1, c2, a):
        return (t1, retro_successor(c1, c2, a, mode), t2)

    return _enumerate("retro", T1, T2, V, elems, lambda e: V.mask(e[1]), lambda e: True, succ,
                      lambda e: (e[0], e[2]))


def _enumerate(kind, T1, T2, V, elems, ctx, pre_ok, succ, states_of) -> Verdict:
    index = {e: i for i, e in enumerate(elems)}
    # per element: list of (need mask, [(mask, successor index or -1 for terminations)])
    checks = []
    for e in elems:
        s1, s2 = states_of(e)
        w = ctx(e)
        ob = []
        for side, A, B, sa, sb in ((1, T1, T2, s1, s2), (2, T2, T1, s2, s1)):
            for c, a, t in A.out(sa):
                need = w & V.mask(c)
                if not need:
                    continue
                ms = []
                for c2, a2, t2 in B.out(sb):
                    if a2 != a:
                        continue
                    nxt = succ(e, t, t2, c, c2, a) if side == 1 else succ(e, t2, t, c2, c, a)
                    if nxt in index:
                        ms.append((V.mask(c2), index[nxt]))
                ob.append((need, ms))
            for c in A.terms(sa):
                need = w & V.mask(c)
                if need:
                    m = 0
                    for c2 in B.terms(sb):
                        m |= V.mask(c2)
                    ob.append((need, [(m, -1)]))
        checks.append((pre_ok(e), ob))
    n = len(elems)
    for bits in range(1 << (n - 1)):
        R = (bits << 1) | 1
        ok = True
        for i in range(n):
            if not (R >> i) & 1:
                continue
            good, ob = checks[i]
            if not good:
                ok = False
                break
            for need, ms in ob:
                cover = 0
                for m, j in ms:
                    if j < 0 or (R >> j) & 1:
                        cover |= m
                if need & ~cover:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            rel = [elems[i] for i in range(n) if (R >> i) & 1]
            return Verdict(True, kind, rel, None)
    return Verdict(False, kind, [], None)
