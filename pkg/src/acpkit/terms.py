"""Process terms, algebra configurations, concrete syntax and spec files."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .conditions import (
    Cond,
    Endo,
    IDENTITY,
    format_cond,
    just_name,
    parse_cond,
    parse_cond_stream,
)
from .errors import AcpError, DeclarationError, ParseError, VariantError
from .lexer import Stream, tokenize

VARIANTS = ("acpec", "acpecs", "acpecr", "acpecr_lastaction")
DELTA_NAME = "delta"
KEYWORDS = frozenset(
    "true false back just delta eps nex encap ce gce state shift rupd laupd id".split()
)


# ---------------------------------------------------------------- AST

class Term:
    __slots__ = ("_h",)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash((type(self).__name__,) + self.args()))

    def args(self) -> tuple:
        return tuple(getattr(self, f) for f in self.__match_args__)

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is type(self) and other._h == self._h and other.args() == self.args()

    def __repr__(self):
        return f"<{format_term(self)}>"

    def children(self) -> tuple["Term", ...]:
        return tuple(a for a in self.args() if isinstance(a, Term))


def _node(cls):
    return dataclass(frozen=True, eq=False, slots=True, repr=False)(cls)


@_node
class Deadlock(Term):
    pass


@_node
class Empty(Term):
    pass


@_node
class Inaccessible(Term):
    pass


@_node
class Action(Term):
    name: str


@_node
class Alt(Term):
    left: Term
    right: Term


@_node
class Seq(Term):
    left: Term
    right: Term


@_node
class Guard(Term):
    cond: Cond
    body: Term


@_node
class Par(Term):
    left: Term
    right: Term


@_node
class LeftMerge(Term):
    left: Term
    right: Term


@_node
class CommMerge(Term):
    left: Term
    right: Term


@_node
class Encap(Term):
    H: frozenset
    body: Term


@_node
class Emit(Term):
    cond: Cond
    body: Term


@_node
class CondEval(Term):
    h: Endo
    body: Term


@_node
class GenCondEval(Term):
    h: Endo
    body: Term


@_node
class StateOp(Term):
    s: str
    body: Term


@_node
class RetroShift0(Term):
    body: Term


@_node
class RetroShiftN(Term):
    n: int
    body: Term


@_node
class RetroUpdate(Term):
    h: Endo
    n: int
    body: Term


@_node
class LastActionUpdate(Term):
    a: str
    n: int
    body: Term


@_node
class Var(Term):
    name: str


@_node
class RecConst(Term):
    var: str
    spec: "RecSpec"


DELTA = Deadlock()
EPS = Empty()
NEX = Inaccessible()


@dataclass(frozen=True)
class RecSpec:
    name: str
    equations: tuple  # sorted tuple of (var, Term)

    @staticmethod
    def make(name: str, eqs: Mapping[str, Term]) -> "RecSpec":
        spec = RecSpec(name, tuple(sorted(eqs.items())))
        spec.check_closed()
        return spec

    @property
    def eqs(self) -> dict[str, Term]:
        return dict(self.equations)

    def check_closed(self) -> None:
        names = {v for v, _ in self.equations}
        for v, t in self.equations:
            for x in free_vars(t):
                if x not in names:
                    raise DeclarationError(f"variable {x} in equation for {v} is not defined by {self.name}")

    def body(self, var: str) -> Term:
        """Right-hand side with every variable replaced by its constant."""
        for v, t in self.equations:
            if v == var:
                return close_vars(t, self)
        raise DeclarationError(f"{var} is not a variable of {self.name}")


def seq(*ts: Term) -> Term:
    """Right-nested sequential composition."""
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Seq(t, out)
    return out


def alt(*ts: Term) -> Term:
    if not ts:
        return DELTA
    out = ts[0]
    for t in ts[1:]:
        out = Alt(out, t)
    return out


def act(name: str) -> Term:
    return DELTA if name == DELTA_NAME else Action(name)


def iter_subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(reversed(u.children()))


def free_vars(t: Term) -> set[str]:
    return {u.name for u in iter_subterms(t) if isinstance(u, Var)}


def map_children(t: Term, f) -> Term:
    vals = [f(a) if isinstance(a, Term) else a for a in t.args()]
    return type(t)(*vals)


def close_vars(t: Term, spec: RecSpec) -> Term:
    if isinstance(t, Var):
        return RecConst(t.name, spec)
    if not t.children():
        return t
    return map_children(t, lambda u: close_vars(u, spec))


def count_subprocesses(t: Term) -> int:
    """The process itself plus every subprocess following a sequential prefix."""
    return 1 + sum(1 for u in iter_subterms(t) if isinstance(u, Seq))


def term_size(t: Term) -> int:
    return sum(1 for _ in iter_subterms(t))


# ---------------------------------------------------------------- configuration

@dataclass
class StateTables:
    states: list[str]
    eval: dict[str, Endo]
    act: dict[tuple[str, str], str] = field(default_factory=dict)
    eff: dict[tuple[str, str], str] = field(default_factory=dict)

    def act_of(self, a: str, s: str) -> str:
        if a == DELTA_NAME:
            return DELTA_NAME
        return self.act.get((a, s), a)

    def eff_of(self, a: str, s: str) -> str:
        if a == DELTA_NAME:
            return s
        return self.eff.get((a, s), s)


@dataclass
class AlgebraConfig:
    atoms: frozenset = frozenset()
    actions: frozenset = frozenset()
    gamma: dict = field(default_factory=dict)
    variant: str = "acpec"
    endos: dict = field(default_factory=dict)
    eff_gce: dict = field(default_factory=dict)
    state_ops: StateTables | None = None
    recspecs: dict = field(default_factory=dict)
    procs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.atoms = frozenset(self.atoms)
        self.actions = frozenset(self.actions)
        if self.variant not in VARIANTS:
            raise VariantError(f"unknown variant {self.variant!r}")
        if self.variant == "acpecr_lastaction" and not self.atoms:
            self.atoms = frozenset(just_name(a) for a in self.actions)
        self.endos.setdefault("id", IDENTITY)

    @property
    def retro(self) -> bool:
        return self.variant.startswith("acpecr")

    @property
    def signals(self) -> bool:
        return self.variant == "acpecs"

    @property
    def exclusive(self) -> bool:
        return self.variant == "acpecr_lastaction"

    def gamma_of(self, a: str, b: str) -> str:
        if a == DELTA_NAME or b == DELTA_NAME:
            return DELTA_NAME
        return self.gamma.get((a, b), self.gamma.get((b, a), DELTA_NAME))

    def eff_gce_of(self, a: str, h: Endo) -> Endo:
        if a == DELTA_NAME or h.name is None:
            return h
        name = self.eff_gce.get((a, h.name))
        return h if name is None else self.endos[name]

    def with_variant(self, variant: str) -> "AlgebraConfig":
        atoms = self.atoms
        if variant == "acpecr_lastaction":
            atoms = frozenset(just_name(a) for a in self.actions)
        return AlgebraConfig(atoms, self.actions, dict(self.gamma), variant, dict(self.endos),
                             dict(self.eff_gce), self.state_ops, dict(self.recspecs), dict(self.procs))


def validate_config(cfg: AlgebraConfig) -> list[tuple]:
    """Return violations as tuples (axiom tag, a, b[, c]); empty means ok."""
    out = []
    acts = sorted(cfg.actions) + [DELTA_NAME]
    g = {}
    for a in acts:
        for b in acts:
            if a == DELTA_NAME or b == DELTA_NAME:
                g[a, b] = cfg.gamma.get((a, b), DELTA_NAME)
            else:
                g[a, b] = cfg.gamma.get((a, b), DELTA_NAME)
    for a in acts:
        for b in acts:
            if g[a, b] != g[b, a]:
                out.append(("C1", a, b))
            if g[a, b] not in acts:
                out.append(("undeclared", a, b, g[a, b]))
                continue
            for c in acts:
                if g.get((g[a, b], c), DELTA_NAME) != g.get((a, g[b, c]), DELTA_NAME):
                    out.append(("C2", a, b, c))
        if g[DELTA_NAME, a] != DELTA_NAME:
            out.append(("C3", DELTA_NAME, a))
    clash = (cfg.atoms & cfg.actions) | ((cfg.atoms | cfg.actions) & KEYWORDS)
    for name in sorted(clash):
        out.append(("name", name))
    if cfg.variant == "acpecr_lastaction":
        if cfg.atoms != frozenset(just_name(a) for a in cfg.actions):
            out.append(("lastaction-atoms",))
    return out


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text: str, cfg: AlgebraConfig, variables: Iterable[str] = ()):
        self.text = text
        self.s = Stream(tokenize(text))
        self.cfg = cfg
        self.vars = set(variables)

    def need(self, ok: bool, what: str):
        if not ok:
            raise VariantError(f"{what} is not available in variant {self.cfg.variant}")

    def sum(self) -> Term:
        t = self.prefix()
        while self.s.accept("+"):
            t = Alt(t, self.prefix())
        return t

    def prefix(self) -> Term:
        s = self.s
        save = s.i
        tok = s.peek()
        if tok.kind == "ident" or tok.text in ("(", "~"):
            try:
                c = parse_cond_stream(s, self.cfg)
            except VariantError:
                raise
            except AcpError:
                c = None
            if c is not None and s.at("->"):
                s.next()
                return Guard(c, self.prefix())
            if c is not None and s.at("^>"):
                self.need(self.cfg.signals, "signal emission")
                s.next()
                return Emit(c, self.prefix())
            s.i = save
        return self.comm()

    def comm(self):
        t = self.lmerge()
        while self.s.accept("|"):
            t = CommMerge(t, self.lmerge())
        return t

    def lmerge(self):
        t = self.par()
        while self.s.accept("|_"):
            t = LeftMerge(t, self.par())
        return t

    def par(self):
        t = self.seq()
        while self.s.accept("||"):
            t = Par(t, self.seq())
        return t

    def seq(self):
        t = self.primary()
        if self.s.accept("."):
            return Seq(t, self.seq())
        return t

    def enclosed(self) -> Term:
        self.s.expect("(")
        t = self.sum()
        self.s.expect(")")
        return t

    def endo(self) -> Endo:
        s = self.s
        if s.accept("{"):
            m = {}
            while not s.at("}"):
                name = s.ident().text
                if name == "just" and s.accept("("):
                    name = just_name(s.ident().text)
                    s.expect(")")
                if name not in self.cfg.atoms:
                    raise DeclarationError(f"undeclared atom {name!r} in endomorphism")
                s.expect("=")
                m[name] = parse_cond_stream(s, self.cfg)
                if not s.accept(";"):
                    break
            s.expect("}")
            return Endo(m)
        tok = s.ident()
        if tok.text not in self.cfg.endos:
            raise DeclarationError(f"unknown endomorphism {tok.text!r}")
        return self.cfg.endos[tok.text]

    def primary(self) -> Term:
        s, cfg = self.s, self.cfg
        tok = s.peek()
        if tok.text == "(":
            return self.enclosed()
        if tok.text == "<":
            s.next()
            x = s.ident().text
            s.expect("|")
            e = s.ident().text
            s.expect(">")
            spec = cfg.recspecs.get(e)
            if spec is None:
                raise DeclarationError(f"unknown recursive specification {e!r}")
            if x not in spec.eqs:
                raise DeclarationError(f"{x} is not a variable of {e}")
            return RecConst(x, spec)
        if tok.kind != "ident":
            raise ParseError(f"expected process term, found {tok.text or 'end of input'!r}", tok.pos)
        s.next()
        w = tok.text
        if w == "delta":
            return DELTA
        if w == "eps":
            return EPS
        if w == "nex":
            self.need(cfg.signals, "nex")
            return NEX
        if w == "encap":
            s.expect("{")
            H = []
            while not s.at("}"):
                a = s.ident().text
                if a not in cfg.actions:
                    raise DeclarationError(f"undeclared action {a!r} in encapsulation set")
                H.append(a)
                if not s.accept(","):
                    break
            s.expect("}")
            return Encap(frozenset(H), self.enclosed())
        if w in ("ce", "gce"):
            self.need(not cfg.signals, "condition evaluation")
            s.expect("[")
            h = self.endo()
            s.expect("]")
            return (CondEval if w == "ce" else GenCondEval)(h, self.enclosed())
        if w == "state":
            self.need(cfg.variant == "acpec", "state operators")
            s.expect("[")
            st = s.ident().text
            s.expect("]")
            if cfg.state_ops is None or st not in cfg.state_ops.states:
                raise DeclarationError(f"unknown state {st!r}")
            return StateOp(st, self.enclosed())
        if w == "shift":
            self.need(cfg.retro, "retrospection shift")
            if s.accept("["):
                n = s.number()
                s.expect("]")
                return RetroShiftN(n, self.enclosed())
            return RetroShift0(self.enclosed())
        if w == "rupd":
            self.need(cfg.retro, "retrospection update")
            s.expect("[")
            h = self.endo()
            s.expect(",")
            n = s.number()
            s.expect("]")
            return RetroUpdate(h, n, self.enclosed())
        if w == "laupd":
            self.need(cfg.exclusive, "last-action update")
            s.expect("[")
            a = s.ident().text
            if a != DELTA_NAME and a not in cfg.actions:
                raise DeclarationError(f"undeclared action {a!r}")
            s.expect(",")
            n = s.number()
            s.expect("]")
            return LastActionUpdate(a, n, self.enclosed())
        if w in self.vars:
            return Var(w)
        if w in cfg.actions:
            return Action(w)
        raise DeclarationError(f"undeclared action {w!r} (position {tok.pos})")


def parse_proc(text: str, cfg: AlgebraConfig, variables: Iterable[str] = ()) -> Term:
    p = _Parser(text, cfg, variables)
    t = p.sum()
    p.s.end()
    return t


# ---------------------------------------------------------------- printer

_LEVEL = {Alt: 0, Guard: 1, Emit: 1, CommMerge: 2, LeftMerge: 3, Par: 4, Seq: 5}
_BINOP = {Alt: " + ", CommMerge: " | ", LeftMerge: " |_ ", Par: " || ", Seq: " . "}


def _cond_text(c: Cond) -> str:
    txt = format_cond(c)
    if any(op in txt for op in ("\\/", "/\\")):
        return f"({txt})"
    return txt


def _fmt(t: Term) -> tuple[str, int]:
    k = type(t)
    if k in _BINOP:
        lv = _LEVEL[k]
        if k is Seq:
            left, right = _wrap(t.left, lv + 1), _wrap(t.right, lv)
        else:
            left, right = _wrap(t.left, lv), _wrap(t.right, lv + 1)
        return left + _BINOP[k] + right, lv
    if k is Guard:
        return f"{_cond_text(t.cond)} -> {_wrap(t.body, 1)}", 1
    if k is Emit:
        return f"{_cond_text(t.cond)} ^> {_wrap(t.body, 1)}", 1
    if k is Deadlock:
        return "delta", 6
    if k is Empty:
        return "eps", 6
    if k is Inaccessible:
        return "nex", 6
    if k is Action:
        return t.name, 6
    if k is Var:
        return t.name, 6
    if k is RecConst:
        return f"<{t.var}|{t.spec.name}>", 6
    if k is Encap:
        return f"encap{{{','.join(sorted(t.H))}}}({format_term(t.body)})", 6
    if k is CondEval:
        return f"ce[{t.h.text()}]({format_term(t.body)})", 6
    if k is GenCondEval:
        return f"gce[{t.h.text()}]({format_term(t.body)})", 6
    if k is StateOp:
        return f"state[{t.s}]({format_term(t.body)})", 6
    if k is RetroShift0:
        return f"shift({format_term(t.body)})", 6
    if k is RetroShiftN:
        return f"shift[{t.n}]({format_term(t.body)})", 6
    if k is RetroUpdate:
        return f"rupd[{t.h.text()},{t.n}]({format_term(t.body)})", 6
    if k is LastActionUpdate:
        return f"laupd[{t.a},{t.n}]({format_term(t.body)})", 6
    raise TypeError(f"not a term: {t!r}")


def _wrap(t: Term, need: int) -> str:
    text, lv = _fmt(t)
    return text if lv >= need else f"({text})"


def format_term(t: Term) -> str:
    return _fmt(t)[0]


# ---------------------------------------------------------------- variant checks

_RETRO_ONLY = (RetroShift0, RetroShiftN, RetroUpdate)


def check_variant(t: Term, cfg: AlgebraConfig) -> None:
    from .conditions import support

    v = cfg.variant
    for u in iter_subterms(t):
        k = type(u)
        if k in (Emit, Inaccessible) and v != "acpecs":
            raise VariantError(f"{k.__name__} is only available in acpecs")
        if k in _RETRO_ONLY and not cfg.retro:
            raise VariantError(f"{k.__name__} needs a retrospection variant")
        if k is LastActionUpdate and not cfg.exclusive:
            raise VariantError("LastActionUpdate needs acpecr_lastaction")
        if k in (CondEval, GenCondEval) and v == "acpecs":
            raise VariantError("condition evaluation is not available in acpecs")
        if k is StateOp and v != "acpec":
            raise VariantError("state operators are only available in acpec")
        if k in (Guard, Emit):
            for a in support(u.cond):
                if a.depth and not cfg.retro:
                    raise VariantError("retrospective condition outside a retrospection variant")
        if k is RecConst:
            for _, body in u.spec.equations:
                check_variant(body, cfg)


# ---------------------------------------------------------------- guardedness

def guardedness_check(spec: RecSpec, cfg: AlgebraConfig | None = None) -> tuple[bool, str | None]:
    """(True, None) when guarded, else (False, description of an unguarded occurrence)."""
    for v, t in spec.equations:
        bad = _unguarded(t)
        if bad is not None:
            return False, f"{bad} unguarded in {v} = {format_term(t)}"
    return True, None


def _unguarded(t: Term) -> str | None:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Seq) and isinstance(t.left, Action):
        return None
    for c in t.children():
        r = _unguarded(c)
        if r is not None:
            return r
    return None


# ---------------------------------------------------------------- spec files

def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{<":
            depth += 1
        elif ch in ")]}>":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [p.strip() for p in out if p.strip()]


def _statements(text: str) -> list[tuple[int, str]]:
    stmts: list[list] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if raw[:1].isspace() and stmts:
            stmts[-1][1] += " " + line.strip()
        else:
            stmts.append([no, line.strip()])
    return [(n, s) for n, s in stmts]


def load_spec(text: str) -> AlgebraConfig:
    stmts = _statements(text)
    variant, atoms, actions, gamma = "acpec", [], [], {}
    rest = []
    for no, st in stmts:
        head, _, body = st.partition(":")
        key = head.strip()
        if key == "variant":
            variant = body.strip()
        elif key == "atoms":
            atoms = [a.strip() for a in body.split(",") if a.strip()]
        elif key == "actions":
            actions = [a.strip() for a in body.split(",") if a.strip()]
        elif key == "gamma":
            for entry in body.replace(";", ",").split(","):
                if not entry.strip():
                    continue
                lhs, eq, rhs = entry.partition("=")
                a, bar, b = lhs.partition("|")
                if not eq or not bar:
                    raise ParseError(f"line {no}: bad gamma entry {entry.strip()!r}")
                gamma[a.strip(), b.strip()] = rhs.strip()
                gamma[b.strip(), a.strip()] = rhs.strip()
        else:
            rest.append((no, st))
    cfg = AlgebraConfig(frozenset(atoms), frozenset(actions), gamma, variant)
    bad = validate_config(cfg)
    if bad:
        raise DeclarationError(f"invalid configuration: {bad[:5]}")
    kinds = {"endo": 0, "eff": 1, "state": 1, "rec": 2, "proc": 3}
    for no, st in rest:
        if st.split()[0] not in kinds:
            raise ParseError(f"line {no}: unknown statement {st!r}")
    rest.sort(key=lambda x: kinds[x[1].split()[0]])
    states: dict[str, list[str]] = {}
    for no, st in rest:
        word = st.split()[0]
        try:
            if word == "endo":
                name, _, body = st[4:].partition(":")
                m = {}
                for part in _split_top(body, ";"):
                    k, _, v = part.partition("=")
                    if k.strip() not in cfg.atoms:
                        raise DeclarationError(f"undeclared atom {k.strip()!r}")
                    m[k.strip()] = parse_cond(v, cfg)
                cfg.endos[name.strip()] = Endo(m, name.strip())
            elif word == "eff":
                name, _, body = st[3:].partition(":")
                for part in _split_top(body, ";"):
                    k, _, v = part.partition("=")
                    cfg.eff_gce[k.strip(), name.strip()] = v.strip()
            elif word == "state":
                name, _, body = st[5:].partition(":")
                states[name.strip()] = _split_top(body, ";")
            elif word == "rec":
                if states and cfg.state_ops is None:
                    cfg.state_ops = _state_tables(states, cfg)
                name, _, body = st[3:].partition(":")
                parts = [p.partition("=") for p in _split_top(body, ";")]
                names = [p[0].strip() for p in parts]
                eqs = {p[0].strip(): parse_proc(p[2], cfg, names) for p in parts}
                cfg.recspecs[name.strip()] = RecSpec.make(name.strip(), eqs)
            elif word == "proc":
                if states and cfg.state_ops is None:
                    cfg.state_ops = _state_tables(states, cfg)
                name, _, body = st[4:].partition("=")
                cfg.procs[name.strip()] = parse_proc(body, cfg)
        except AcpError as e:
            raise type(e)(f"line {no}: {e}") from None
    if states and cfg.state_ops is None:
        cfg.state_ops = _state_tables(states, cfg)
    for name in cfg.eff_gce.values():
        if name not in cfg.endos:
            raise DeclarationError(f"eff table names unknown endomorphism {name!r}")
    return cfg


def _state_tables(states: dict[str, list[str]], cfg: AlgebraConfig) -> StateTables:
    tab = StateTables(list(states), {})
    for s, parts in states.items():
        tab.eval[s] = IDENTITY
        for part in parts:
            k, _, v = part.partition("=")
            k, v = k.strip(), v.strip()
            if k == "eval":
                if v not in cfg.endos:
                    raise DeclarationError(f"unknown endomorphism {v!r}")
                tab.eval[s] = cfg.endos[v]
            else:
                a2, _, s2 = v.partition("@")
                tab.act[k, s] = a2.strip() or k
                tab.eff[k, s] = s2.strip() or s
    for (a, s), s2 in tab.eff.items():
        if s2 not in states:
            raise DeclarationError(f"state table names unknown state {s2!r}")
    return tab
