import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from acpkit.bisim import refined_retro_bisim, retro_split_bisim, sig_split_bisim, split_bisim
from acpkit.conditions import BOT, TOP, Endo, retro
from acpkit.errors import DeclarationError, OracleBoundError, RequiresUnfoldingError, VariantError
from acpkit.generators import TermGen, default_config
from acpkit.rewrite import EQUAL, NOT_PROVED, eq_axiomatic, normalize, substitute_eval
from acpkit.sos import cts_of
from acpkit.terms import (
    Action,
    Alt,
    CondEval,
    Guard,
    RecConst,
    RecSpec,
    Seq,
    Var,
    count_subprocesses,
    format_term,
    load_spec,
    parse_proc,
)


def norm(text, cfg):
    return format_term(normalize(parse_proc(text, cfg), cfg))


def test_examples():
    cfg = default_config("acpec")
    assert norm("false -> a", cfg) == "delta"
    assert norm("a + delta", cfg) == "a"
    assert norm("a . eps", cfg) == "a"
    assert norm("eps |_ a", cfg) == "delta"
    assert norm("a . b || d", cfg) == "a . (b . d + d . b) + d . a . b"
    assert eq_axiomatic(parse_proc("(p \\/ q) -> a", cfg), parse_proc("p -> a + q -> a", cfg), cfg) == EQUAL
    assert eq_axiomatic(parse_proc("a . (b + c)", cfg), parse_proc("a . b + a . c", cfg), cfg) == NOT_PROVED


def test_retrospection_is_pulled_through_prefixes():
    cfg = default_config("acpecr")
    assert norm("a . (back(p) -> b)", cfg) == "~p -> a . delta + p -> a . b"


def test_recursion_needs_unfolding():
    cfg = default_config("acpec")
    X = RecConst("X", RecSpec.make("E", {"X": Seq(Action("a"), Var("X"))}))
    with pytest.raises(RequiresUnfoldingError):
        normalize(X, cfg)


@pytest.mark.parametrize("variant", ["acpec", "acpecs", "acpecr", "acpecr_lastaction"])
@given(seed=st.integers(0, 10**6))
def test_normal_forms_are_fixed_points(variant, seed):
    cfg = default_config(variant)
    t = TermGen(cfg, random.Random(seed), depth=4).term()
    n = normalize(t, cfg)
    assert normalize(n, cfg) == n
    assert eq_axiomatic(t, n, cfg) == EQUAL


@pytest.mark.parametrize("variant,kind", [
    ("acpec", "plain"), ("acpecs", "signal"), ("acpecr", "plain"), ("acpecr_lastaction", "last_action")])
@given(seed=st.integers(0, 10**6))
def test_normalization_preserves_behaviour(variant, kind, seed):
    cfg = default_config(variant)
    # with signals, merges stay out: their axioms disagree with the model (see the axioms tests)
    g = TermGen(cfg, random.Random(seed), depth=3, merges=variant != "acpecs")
    t = g.term()
    T, N = cts_of(t, cfg), cts_of(normalize(t, cfg), cfg)
    if variant == "acpecs":
        assert sig_split_bisim(T, N).related
    elif cfg.retro:
        if retro_split_bisim(T, N, kind).related:
            return
        # the normal form may test a fact several steps back that one-step contexts forget
        try:
            assert refined_retro_bisim(T, N, kind).related
        except OracleBoundError:
            assume(False)
    else:
        assert split_bisim(T, N).related


@given(seed=st.integers(0, 10**6))
def test_generalised_r6(seed):
    cfg = default_config("acpecr")
    g = TermGen(cfg, random.Random(seed), depth=2, merges=False)
    phi, x, y, a = g.cond(), g.term(), g.term(), Action(g.action())
    lhs = Seq(a, Alt(Guard(retro(phi), x), Guard(~retro(phi), y)))
    rhs = Alt(Guard(phi, Seq(a, x)), Guard(~phi, Seq(a, y)))
    assert eq_axiomatic(lhs, rhs, cfg) == EQUAL


@given(seed=st.integers(0, 10**6), bits=st.integers(0, 7))
def test_substitution_matches_assignment_endomorphism(seed, bits):
    cfg = default_config("acpec")
    t = TermGen(cfg, random.Random(seed), depth=4).term()
    sigma = {x: bool(bits >> i & 1) for i, x in enumerate(("p", "q", "r"))}
    h = Endo({x: TOP if v else BOT for x, v in sigma.items()})
    assert normalize(substitute_eval(t, sigma, cfg), cfg) == normalize(CondEval(h, t), cfg)


def test_substitution_needs_total_assignment():
    cfg = default_config("acpec")
    with pytest.raises(DeclarationError):
        substitute_eval(parse_proc("p -> a", cfg), {}, cfg)
    with pytest.raises(VariantError):
        substitute_eval(parse_proc("a", default_config("acpecr")), {}, default_config("acpecr"))


def test_last_action_reduces_subprocesses():
    cfg = load_spec("variant: acpecr_lastaction\nactions: a, b, a1, a2, b1, b2, c1, c2, d1, d2\n")
    lhs = parse_proc("a . (a1 . c1 + a2 . c2) + b . (b1 . d1 + b2 . d2)", cfg)
    rhs = parse_proc(
        "(a + b) . (just(a) -> (a1 + a2) . (just(a1) -> c1 + just(a2) -> c2)"
        " + just(b) -> (b1 + b2) . (just(b1) -> d1 + just(b2) -> d2))", cfg)
    assert (count_subprocesses(lhs), count_subprocesses(rhs)) == (7, 4)
    assert eq_axiomatic(lhs, rhs, cfg) == EQUAL
    assert format_term(normalize(rhs, cfg)) == format_term(lhs)
