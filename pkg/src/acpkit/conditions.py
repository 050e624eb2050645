"""Free Boolean algebra over (retrospection-indexed) atomic conditions.

Conditions are canonical reduced ordered decision diagrams kept in one
process-wide unique table, so logical equivalence is object equality.
Atoms are ordered by name, then by depth.
"""
from __future__ import annotations

import threading
from typing import Callable, Iterable, Mapping, NamedTuple

from .errors import DeclarationError, DepthCapError, ParseError, VariantError
from .lexer import Stream, tokenize

DEPTH_CAP = 16


def set_depth_cap(n: int) -> None:
    global DEPTH_CAP
    DEPTH_CAP = n


class Atom(NamedTuple):
    name: str
    depth: int = 0

    @property
    def is_just(self) -> bool:
        return self.name.startswith("just(")

    def text(self) -> str:
        s = self.name
        for _ in range(self.depth):
            s = f"back({s})"
        return s


def just_name(action: str) -> str:
    return f"just({action})"


def just_action(name: str) -> str | None:
    if name.startswith("just(") and name.endswith(")"):
        return name[5:-1]
    return None


# ---------------------------------------------------------------- store

_lock = threading.RLock()
_var: list[Atom | None] = [None, None]
_lo: list[int] = [0, 1]
_hi: list[int] = [0, 1]
_unique: dict[tuple, int] = {}
_and_cache: dict[tuple[int, int], int] = {}
_or_cache: dict[tuple[int, int], int] = {}
_not_cache: dict[int, int] = {}


def _mk(v: Atom, lo: int, hi: int) -> int:
    if lo == hi:
        return lo
    key = (v, lo, hi)
    n = _unique.get(key)
    if n is None:
        with _lock:
            n = _unique.get(key)
            if n is None:
                n = len(_var)
                _var.append(v)
                _lo.append(lo)
                _hi.append(hi)
                _unique[key] = n
    return n


def _not(u: int) -> int:
    if u < 2:
        return 1 - u
    r = _not_cache.get(u)
    if r is None:
        r = _mk(_var[u], _not(_lo[u]), _not(_hi[u]))
        _not_cache[u] = r
    return r


def _apply(u: int, v: int, is_and: bool) -> int:
    if is_and:
        if u == 0 or v == 0:
            return 0
        if u == 1:
            return v
        if v == 1 or u == v:
            return u
        cache = _and_cache
    else:
        if u == 1 or v == 1:
            return 1
        if u == 0:
            return v
        if v == 0 or u == v:
            return u
        cache = _or_cache
    key = (u, v) if u < v else (v, u)
    r = cache.get(key)
    if r is not None:
        return r
    a, b = _var[u], _var[v]
    if a == b:
        r = _mk(a, _apply(_lo[u], _lo[v], is_and), _apply(_hi[u], _hi[v], is_and))
    elif a < b:
        r = _mk(a, _apply(_lo[u], v, is_and), _apply(_hi[u], v, is_and))
    else:
        r = _mk(b, _apply(u, _lo[v], is_and), _apply(u, _hi[v], is_and))
    cache[key] = r
    return r


def _ite(f: int, g: int, h: int) -> int:
    return _apply(_apply(f, g, True), _apply(_not(f), h, True), False)


class Cond:
    """A canonical condition; equal objects denote equivalent conditions."""

    __slots__ = ("n",)

    def __init__(self, n: int):
        self.n = n

    def __eq__(self, other):
        return isinstance(other, Cond) and other.n == self.n

    def __hash__(self):
        return hash(("Cond", self.n))

    def __and__(self, other: Cond) -> Cond:
        return Cond(_apply(self.n, other.n, True))

    def __or__(self, other: Cond) -> Cond:
        return Cond(_apply(self.n, other.n, False))

    def __invert__(self) -> Cond:
        return Cond(_not(self.n))

    def __le__(self, other: Cond) -> bool:
        return _apply(self.n, _not(other.n), True) == 0

    def __lt__(self, other: Cond) -> bool:
        # used only for deterministic sorting, not for the lattice order
        return sort_key(self) < sort_key(other)

    def __repr__(self):
        return f"Cond({format_cond(self)!r})"

    def __str__(self):
        return format_cond(self)

    @property
    def is_top(self) -> bool:
        return self.n == 1

    @property
    def is_bot(self) -> bool:
        return self.n == 0


TOP = Cond(1)
BOT = Cond(0)


def atom(name: str, depth: int = 0) -> Cond:
    if depth > DEPTH_CAP:
        raise DepthCapError(f"retrospection depth {depth} exceeds cap {DEPTH_CAP}")
    if depth < 0:
        raise ValueError("negative depth")
    return Cond(_mk(Atom(name, depth), 0, 1))


def neg(c: Cond) -> Cond:
    return ~c


def join(a: Cond, b: Cond) -> Cond:
    return a | b


def meet(a: Cond, b: Cond) -> Cond:
    return a & b


def sup(cs: Iterable[Cond]) -> Cond:
    r = 0
    for c in cs:
        r = _apply(r, c.n, False)
        if r == 1:
            break
    return Cond(r)


def inf(cs: Iterable[Cond]) -> Cond:
    r = 1
    for c in cs:
        r = _apply(r, c.n, True)
        if r == 0:
            break
    return Cond(r)


def leq(a: Cond, b: Cond, exclusive: bool = False) -> bool:
    """a below b; with exclusive=True, modulo mutual exclusion of just-atoms."""
    d = _apply(a.n, _not(b.n), True)
    if d == 0:
        return True
    if not exclusive:
        return False
    return _apply(d, exclusion(support(Cond(d))).n, True) == 0


def is_bot(c: Cond, exclusive: bool = False) -> bool:
    return leq(c, BOT, exclusive)


def exclusion(atoms: Iterable[Atom]) -> Cond:
    """At most one just-atom holds at each depth, over the given atoms."""
    by_depth: dict[int, list[Atom]] = {}
    for a in atoms:
        if a.is_just:
            by_depth.setdefault(a.depth, []).append(a)
    r = TOP
    for group in by_depth.values():
        group = sorted(group)
        for i, x in enumerate(group):
            for y in group[i + 1:]:
                r = r & ~(atom(*x) & atom(*y))
    return r


def boolean_op(tag: str, *operands, declared: Iterable[str] | None = None) -> Cond:
    if tag == "bot":
        _arity(tag, operands, 0)
        return BOT
    if tag == "top":
        _arity(tag, operands, 0)
        return TOP
    if tag == "atom":
        if len(operands) not in (1, 2):
            raise TypeError("atom takes a name and an optional depth")
        name = operands[0]
        if declared is not None and name not in set(declared):
            raise DeclarationError(f"undeclared atom {name!r}")
        return atom(*operands)
    if tag == "neg":
        _arity(tag, operands, 1)
        return ~operands[0]
    if tag == "join":
        _arity(tag, operands, 2)
        return operands[0] | operands[1]
    if tag == "meet":
        _arity(tag, operands, 2)
        return operands[0] & operands[1]
    raise ValueError(f"unknown boolean operation {tag!r}")


def _arity(tag, operands, k):
    if len(operands) != k:
        raise TypeError(f"{tag} takes {k} operands, got {len(operands)}")


def support(c: Cond) -> set[Atom]:
    seen = set()
    out = set()
    stack = [c.n]
    while stack:
        u = stack.pop()
        if u < 2 or u in seen:
            continue
        seen.add(u)
        out.add(_var[u])
        stack.append(_lo[u])
        stack.append(_hi[u])
    return out


def max_depth(c: Cond) -> int:
    return max((a.depth for a in support(c)), default=0)


def evaluate(c: Cond, valuation: Mapping[Atom, bool]) -> bool:
    u = c.n
    while u >= 2:
        u = _hi[u] if valuation.get(_var[u], False) else _lo[u]
    return u == 1


def sort_key(c: Cond) -> tuple:
    """Structural key independent of allocation order."""
    memo: dict[int, tuple] = {}

    def key(u):
        if u < 2:
            return (u,)
        r = memo.get(u)
        if r is None:
            r = (2, _var[u], key(_lo[u]), key(_hi[u]))
            memo[u] = r
        return r

    return key(c.n)


# ---------------------------------------------------------------- transformers

def substitute(c: Cond, f: Callable[[Atom], Cond | None]) -> Cond:
    """Homomorphic substitution; f returns None to keep an atom fixed."""
    memo: dict[int, int] = {}

    def go(u):
        if u < 2:
            return u
        r = memo.get(u)
        if r is None:
            v = _var[u]
            img = f(v)
            g = _mk(v, 0, 1) if img is None else img.n
            r = _ite(g, go(_hi[u]), go(_lo[u]))
            memo[u] = r
        return r

    return Cond(go(c.n))


def retro_n(c: Cond, k: int = 1) -> Cond:
    if k == 0:
        return c
    return substitute(c, lambda a: atom(a.name, a.depth + k))


def retro(c: Cond, cfg=None) -> Cond:
    _need_retro(cfg)
    return retro_n(c, 1)


def retro_shift(n: int, c: Cond, cfg=None) -> Cond:
    _need_retro(cfg)

    def f(a: Atom):
        bump = a.depth >= n if a.is_just else a.depth > n
        return atom(a.name, a.depth + 1) if bump else None

    return substitute(c, f)


def retro_update(h: "Endo", n: int, c: Cond, cfg=None) -> Cond:
    _need_retro(cfg)

    def f(a: Atom):
        if a.depth != n or a.name not in h.mapping:
            return None
        return retro_n(h.mapping[a.name], a.depth)

    return substitute(c, f)


def last_action_update(act: str, n: int, c: Cond, cfg=None) -> Cond:
    """act may be 'delta', which sends every depth-n just-atom to false."""
    if cfg is not None and cfg.variant != "acpecr_lastaction":
        raise VariantError("last-action update needs the last-action variant")

    def f(a: Atom):
        if a.depth != n or not a.is_just:
            return None
        return TOP if just_action(a.name) == act else BOT

    return substitute(c, f)


def _need_retro(cfg) -> None:
    if cfg is not None and not cfg.variant.startswith("acpecr"):
        raise VariantError(f"retrospection is not available in variant {cfg.variant}")


class Endo:
    """Endomorphism given by images of base atoms; other atoms are fixed."""

    __slots__ = ("mapping", "name", "_h")

    def __init__(self, mapping: Mapping[str, Cond], name: str | None = None):
        self.mapping = {k: v for k, v in mapping.items() if v != atom(k)}
        self.name = name
        self._h = hash((name, frozenset(self.mapping.items())))

    def __eq__(self, other):
        return isinstance(other, Endo) and self.name == other.name and self.mapping == other.mapping

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"Endo({self.text()})"

    def image(self, name: str) -> Cond:
        return self.mapping.get(name, atom(name))

    def text(self) -> str:
        if self.name is not None:
            return self.name
        body = "; ".join(f"{k}={format_cond(v)}" for k, v in sorted(self.mapping.items()))
        return "{" + body + "}"

    def compose(self, inner: "Endo") -> "Endo":
        """self after inner."""
        names = set(self.mapping) | set(inner.mapping)
        return Endo({k: apply_endo(self, inner.image(k)) for k in names})


IDENTITY = Endo({}, "id")


def apply_endo(h: Endo, c: Cond) -> Cond:
    return substitute(c, lambda a: h.mapping.get(a.name) if a.depth == 0 else None)


def assignment_endo(assignment: Mapping[str, bool]) -> Endo:
    return Endo({k: TOP if v else BOT for k, v in assignment.items()})


# ---------------------------------------------------------------- text syntax

def parse_cond(text: str, cfg=None) -> Cond:
    s = Stream(tokenize(text))
    c = parse_cond_stream(s, cfg)
    s.end()
    return c


def parse_cond_stream(s: Stream, cfg=None) -> Cond:
    c = _parse_meet(s, cfg)
    while s.accept("\\/"):
        c = c | _parse_meet(s, cfg)
    return c


def _parse_meet(s, cfg):
    c = _parse_unary(s, cfg)
    while s.accept("/\\"):
        c = c & _parse_unary(s, cfg)
    return c


def _parse_unary(s: Stream, cfg) -> Cond:
    t = s.peek()
    if s.accept("~"):
        return ~_parse_unary(s, cfg)
    if s.accept("("):
        c = parse_cond_stream(s, cfg)
        s.expect(")")
        return c
    if t.kind != "ident":
        raise ParseError(f"expected condition, found {t.text or 'end of input'!r}", t.pos)
    s.next()
    if t.text == "true":
        return TOP
    if t.text == "false":
        return BOT
    if t.text == "back":
        if cfg is not None and not cfg.variant.startswith("acpecr"):
            raise VariantError(f"back(...) is not available in variant {cfg.variant}")
        s.expect("(")
        c = parse_cond_stream(s, cfg)
        s.expect(")")
        return retro_n(c, 1)
    if t.text == "just" and s.at("("):
        if cfg is not None and cfg.variant != "acpecr_lastaction":
            raise VariantError(f"just(...) is not available in variant {cfg.variant}")
        s.expect("(")
        a = s.ident()
        s.expect(")")
        if cfg is not None and a.text not in cfg.actions:
            raise DeclarationError(f"undeclared action {a.text!r} in just(...)")
        return atom(just_name(a.text))
    if cfg is not None and t.text not in cfg.atoms:
        raise DeclarationError(f"undeclared atom {t.text!r} (position {t.pos})")
    return atom(t.text)


def format_cond(c: Cond) -> str:
    text, _ = _fmt(c.n, {})
    return text


# precedence: 3 atomic/negation, 2 meet, 1 join
def _fmt(u: int, memo) -> tuple[str, int]:
    if u == 1:
        return "true", 3
    if u == 0:
        return "false", 3
    r = memo.get(u)
    if r is not None:
        return r
    a = _var[u].text()
    lo, hi = _lo[u], _hi[u]
    na = "~" + a
    if hi == 1 and lo == 0:
        r = (a, 3)
    elif hi == 0 and lo == 1:
        r = (na, 3)
    elif hi == 1:
        r = (f"{a} \\/ {_wrap(lo, 1, memo)}", 1)
    elif lo == 1:
        r = (f"{na} \\/ {_wrap(hi, 1, memo)}", 1)
    elif hi == 0:
        r = (f"{na} /\\ {_wrap(lo, 2, memo)}", 2)
    elif lo == 0:
        r = (f"{a} /\\ {_wrap(hi, 2, memo)}", 2)
    else:
        r = (f"{a} /\\ {_wrap(hi, 2, memo)} \\/ {na} /\\ {_wrap(lo, 2, memo)}", 1)
    memo[u] = r
    return r


def _wrap(u, need, memo):
    text, prec = _fmt(u, memo)
    return text if prec >= need else f"({text})"
