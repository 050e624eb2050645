import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acpkit.bisim import retro_split_bisim, sig_split_bisim, split_bisim
from acpkit.conditions import TOP, Endo, atom, retro
from acpkit.cts import (
    Cts,
    conn,
    dump_cts,
    iso_check,
    load_cts,
    nr_i,
    ts_act,
    ts_combine,
    ts_par_retro,
    ts_unary,
    ts_unfold,
    upd,
)
from acpkit.errors import AcyclicityError, VariantError
from acpkit.generators import TermGen, bisimilar_variant, default_config, random_cts
from acpkit.sos import cts_of
from acpkit.terms import Alt, CommMerge, Emit, Encap, Guard, LeftMerge, Par, Seq, parse_proc

CTORS = {"alt": Alt, "seq": Seq, "par": Par, "leftm": LeftMerge, "comm": CommMerge}


@given(seed=st.integers(0, 10**6), sig=st.booleans())
def test_json_round_trip(seed, sig):
    rng = random.Random(seed)
    T = random_cts(rng, rng.randint(1, 4), ["p", "q"], ["a", "b"], signals=sig)
    U = load_cts(dump_cts(T))
    assert iso_check(T.renumbered(), U) is not None


def test_conn_drops_unreachable_states():
    T = Cts([0, 1, 2], 0, [(0, TOP, "a", 1), (2, TOP, "b", 0)], [(2, TOP)])
    R = conn(T)
    assert R.states == [0, 1] and R.trans == [(0, TOP, "a", 1)] and R.term == []


def test_iso_check():
    rng = random.Random(3)
    T = random_cts(rng, 3, ["p"], ["a", "b"])
    perm = {0: "x", 1: "y", 2: "z"}
    U = Cts([perm[s] for s in T.states], perm[T.init], [(perm[a], c, x, perm[b]) for a, c, x, b in T.trans],
            [(perm[s], c) for s, c in T.term])
    m = iso_check(T, U)
    assert m == perm
    assert iso_check(ts_act("a"), ts_act("b")) is None


def test_operands_must_share_variant():
    with pytest.raises(VariantError):
        ts_combine("alt", ts_act("a"), ts_act("a", signals=True), default_config())


@pytest.mark.parametrize("tag", list(CTORS))
@given(seed=st.integers(0, 10**6))
def test_binary_constructions_match_sos(tag, seed):
    cfg = default_config("acpec")
    g = TermGen(cfg, random.Random(seed), depth=3)
    p, q = g.term(), g.term()
    M = ts_combine(tag, cts_of(p, cfg), cts_of(q, cfg), cfg)
    assert split_bisim(cts_of(CTORS[tag](p, q), cfg), M).related


@given(seed=st.integers(0, 10**6))
def test_unary_constructions_match_sos(seed):
    cfg = default_config("acpecs")
    g = TermGen(cfg, random.Random(seed), depth=3)
    p, phi, H = g.term(), g.cond(), g.subset()
    T = cts_of(p, cfg)
    assert sig_split_bisim(cts_of(Guard(phi, p), cfg), ts_unary("guard", T, cfg, phi)).related
    assert sig_split_bisim(cts_of(Emit(phi, p), cfg), ts_unary("emit", T, cfg, phi)).related
    assert sig_split_bisim(cts_of(Encap(H, p), cfg), ts_unary("encap", T, cfg, H)).related


@given(seed=st.integers(0, 10**6))
def test_translation_preserves_bisimilarity(seed):
    rng = random.Random(seed)
    T = random_cts(rng, rng.randint(1, 4), ["p", "q"], ["a", "b"])
    U = bisimilar_variant(T, rng, ["p", "q"])
    h = Endo({"p": atom("q") | ~atom("p"), "q": ~atom("q")})
    assert split_bisim(ts_unary("translate", T, arg=h), ts_unary("translate", U, arg=h)).related


@given(seed=st.integers(0, 10**6))
def test_unfolding_is_bisimilar(seed):
    cfg = default_config("acpec")
    T = cts_of(TermGen(cfg, random.Random(seed), depth=3, merges=False).term(), cfg)
    assert split_bisim(ts_unfold(T), T).related


def test_unfolding_a_cycle_needs_a_bound():
    T = Cts([0], 0, [(0, TOP, "a", 0)], [])
    with pytest.raises(AcyclicityError):
        ts_unfold(T)
    U = ts_unfold(T, bound=3)
    assert len(U.states) == 4 and U.exhausted


def test_retrospection_bookkeeping():
    p = atom("p")
    # component 2 moved once after component 1's step, so its retrospection deepens
    path = ((0, 0), ("l", p, None, "a", None), (1, 0), ("r", None, TOP, "b", None), (1, 1))
    assert nr_i(1, path) == 1 and nr_i(2, path) == 1
    assert upd(1, retro(p), path[:3]) == retro(p)
    assert upd(1, retro(p), path) == retro(retro(p))


@pytest.mark.parametrize("variant,mode", [("acpecr", "plain"), ("acpecr_lastaction", "last_action")])
@pytest.mark.parametrize("tag", ["par", "leftm", "comm"])
@settings(max_examples=25)
@given(seed=st.integers(0, 10**6))
def test_retro_merge_construction_matches_sos(variant, mode, tag, seed):
    cfg = default_config(variant)
    g = TermGen(cfg, random.Random(seed), depth=3, merges=False)
    p, q = g.term(), g.term()
    M = ts_par_retro(tag, cts_of(p, cfg), cts_of(q, cfg), cfg)
    assert retro_split_bisim(cts_of(CTORS[tag](p, q), cfg), M, mode).related


def test_literal_gluing_loses_moves_of_terminating_states():
    cfg = default_config("acpec")
    left = parse_proc("a . (eps + b)", cfg)
    right = parse_proc("c", cfg)
    T1, T2 = cts_of(left, cfg), cts_of(right, cfg)
    sos = cts_of(Seq(left, right), cfg)
    assert split_bisim(sos, ts_combine("seq", T1, T2, cfg)).related
    glued = ts_combine("seq", T1, T2, cfg, literal=True)
    # after a, the literal construction only offers c; b has been lost
    assert not split_bisim(sos, glued).related
