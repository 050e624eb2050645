import random
from itertools import product

import pytest

from acpkit.conditions import TOP, Endo, atom
from acpkit.errors import DeclarationError, ParseError, VariantError
from acpkit.generators import TermGen, default_config
from acpkit.terms import (
    DELTA,
    EPS,
    Action,
    AlgebraConfig,
    Alt,
    CondEval,
    GenCondEval,
    Guard,
    LastActionUpdate,
    RecSpec,
    RetroShift0,
    RetroShiftN,
    RetroUpdate,
    Seq,
    StateOp,
    StateTables,
    Var,
    check_variant,
    count_subprocesses,
    format_term,
    guardedness_check,
    load_spec,
    parse_proc,
    validate_config,
)


def cfg_with_tables(variant="acpec"):
    cfg = default_config(variant)
    if variant == "acpec":
        cfg.endos["h"] = Endo({"p": TOP}, "h")
        cfg.state_ops = StateTables(["s0", "s1"], {"s0": cfg.endos["h"], "s1": cfg.endos["id"]})
    return cfg


def test_precedence_examples():
    cfg = default_config("acpec")
    assert parse_proc("true -> a + b", cfg) == Alt(Guard(TOP, Action("a")), Action("b"))
    assert parse_proc("a . b + c", cfg) == Alt(Seq(Action("a"), Action("b")), Action("c"))
    with pytest.raises(VariantError):
        parse_proc("back(p) -> b", cfg)


def test_seq_is_right_nested():
    cfg = default_config("acpec")
    assert parse_proc("a . b . c", cfg) == Seq(Action("a"), Seq(Action("b"), Action("c")))


def test_format_examples():
    assert format_term(Alt(Action("a"), Action("b"))) == "a + b"
    assert format_term(Guard(atom("p") & atom("q"), DELTA)) == "(p /\\ q) -> delta"


def test_parse_errors_carry_position():
    cfg = default_config("acpec")
    with pytest.raises(ParseError) as e:
        parse_proc("a + + b", cfg)
    assert e.value.pos == 4
    with pytest.raises(DeclarationError):
        parse_proc("zz", cfg)
    with pytest.raises(VariantError):
        parse_proc("nex", cfg)
    with pytest.raises(VariantError):
        parse_proc("p ^> a", cfg)


def _decorate(t, cfg, rng):
    """Wrap random subterms in the variant's extra operators."""
    h = Endo({"p": atom("q") | atom("r")})
    opts = []
    if cfg.variant in ("acpec", "acpecr", "acpecr_lastaction"):
        opts += [lambda x: CondEval(h, x), lambda x: GenCondEval(cfg.endos["id"], x)]
    if cfg.variant == "acpec":
        opts += [lambda x: StateOp("s1", x)]
    if cfg.retro:
        opts += [RetroShift0, lambda x: RetroShiftN(rng.randint(0, 3), x), lambda x: RetroUpdate(h, 2, x)]
    if cfg.exclusive:
        h2 = Endo({"just(a)": atom("just(b)")})
        opts = [lambda x: CondEval(h2, x), RetroShift0, lambda x: LastActionUpdate("a", 1, x)]
    if not opts or rng.random() < 0.5:
        return t
    return rng.choice(opts)(t)


@pytest.mark.parametrize("variant", ["acpec", "acpecs", "acpecr", "acpecr_lastaction"])
def test_round_trip_random_terms(variant):
    cfg = cfg_with_tables(variant)
    rng = random.Random(variant)
    for i in range(1000):
        g = TermGen(cfg, rng, depth=rng.randint(1, 5))
        t = _decorate(g.term(), cfg, rng)
        text = format_term(t)
        assert parse_proc(text, cfg) == t, text


def test_validate_config_examples():
    ok = AlgebraConfig({"p"}, {"a", "b", "c"}, {("a", "b"): "c", ("b", "a"): "c"})
    assert validate_config(ok) == []
    one_sided = AlgebraConfig({"p"}, {"a", "b", "c"}, {("a", "b"): "c"})
    assert ("C1", "a", "b") in validate_config(one_sided)
    absorbing = AlgebraConfig({"p"}, {"a", "b", "c"}, {("delta", "a"): "a", ("a", "delta"): "a"})
    assert ("C3", "delta", "a") in validate_config(absorbing)


def brute_force_violations(acts, gamma):
    full = acts + ["delta"]

    def g(a, b):
        return gamma.get((a, b), "delta")

    comm = any(g(a, b) != g(b, a) for a, b in product(full, full))
    assoc = any(g(g(a, b), c) != g(a, g(b, c)) for a, b, c in product(full, full, full))
    absorb = any(g("delta", a) != "delta" for a in full)
    return comm, assoc, absorb


def test_validate_config_agrees_with_brute_force():
    rng = random.Random(7)
    acts = ["a", "b", "c"]
    full = acts + ["delta"]
    for _ in range(300):
        gamma = {}
        for x, y in product(full, full):
            if rng.random() < 0.2:
                gamma[x, y] = rng.choice(full)
        cfg = AlgebraConfig(frozenset(), frozenset(acts), gamma)
        bad = {v[0] for v in validate_config(cfg)}
        comm, assoc, absorb = brute_force_violations(acts, gamma)
        assert ("C1" in bad) == comm
        assert ("C2" in bad) == assoc
        assert ("C3" in bad) == absorb


def test_lastaction_atoms_are_derived():
    cfg = load_spec("variant: acpecr_lastaction\nactions: a, b\n")
    assert cfg.atoms == {"just(a)", "just(b)"}
    with pytest.raises(DeclarationError):
        load_spec("variant: acpecr_lastaction\natoms: p\nactions: a\n")


def test_guardedness_examples():
    cfg = default_config("acpec")
    X = Var("X")
    assert guardedness_check(RecSpec.make("E", {"X": Seq(Action("a"), X)}), cfg) == (True, None)
    ok, why = guardedness_check(RecSpec.make("E", {"X": Alt(X, Action("a"))}), cfg)
    assert not ok and "X" in why
    guarded_in_guard = Alt(Guard(TOP, Seq(Action("a"), X)), DELTA)
    assert guardedness_check(RecSpec.make("E", {"X": guarded_in_guard}), cfg)[0]
    assert guardedness_check(RecSpec.make("E", {"X": Seq(EPS, Seq(Action("a"), X))}), cfg)[0]
    # the eps branch reaches X without an action
    assert not guardedness_check(RecSpec.make("E", {"X": Seq(Alt(Action("a"), EPS), X)}), cfg)[0]


def test_recspec_must_be_closed():
    with pytest.raises(DeclarationError):
        RecSpec.make("E", {"X": Seq(Action("a"), Var("Y"))})


def test_load_spec_sections():
    text = """
variant: acpec
atoms: p, q
actions: a, b, c
gamma: a|b=c
endo h: p = ~q; q = true
eff h: a = h
rec E: X = a . Y; Y = b . X
proc main = <X|E> + h_unused
"""
    with pytest.raises(DeclarationError):
        load_spec(text)
    cfg = load_spec(text.replace(" + h_unused", ""))
    assert cfg.gamma_of("b", "a") == "c"
    assert cfg.endos["h"].image("p") == ~atom("q")
    assert cfg.eff_gce_of("a", cfg.endos["h"]) is cfg.endos["h"]
    assert set(cfg.recspecs["E"].eqs) == {"X", "Y"}
    assert format_term(cfg.procs["main"]) == "<X|E>"


def test_check_variant_rejects_foreign_nodes():
    cfg = default_config("acpec")
    with pytest.raises(VariantError):
        check_variant(RetroShift0(Action("a")), cfg)


def test_count_subprocesses():
    cfg = default_config("acpec")
    assert count_subprocesses(parse_proc("a", cfg)) == 1
    assert count_subprocesses(parse_proc("a . b + c . d", cfg)) == 3
