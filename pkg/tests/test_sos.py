import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from acpkit.conditions import BOT, TOP, atom, is_bot
from acpkit.errors import UnguardedError
from acpkit.generators import TermGen, default_config
from acpkit.sos import cts_of, signal, step
from acpkit.terms import (
    EPS,
    NEX,
    Action,
    Alt,
    Emit,
    Guard,
    Par,
    RecConst,
    RecSpec,
    Seq,
    Var,
    parse_proc,
)


def test_step_examples():
    cfg = default_config("acpec")
    assert step(EPS, cfg).terms == (TOP,) and step(EPS, cfg).trans == ()
    assert step(Action("a"), cfg).trans == ((TOP, "a", EPS),)
    p = atom("p")
    assert step(Guard(p, Action("a")), cfg).trans == ((p, "a", EPS),)
    assert step(Guard(p & ~atom("q") & atom("q"), Action("a")), cfg).trans == ()


def test_nex_step():
    cfg = default_config("acpecs")
    s = step(NEX, cfg)
    assert s.signal == BOT and s.trans == () and s.terms == ()


def test_synchronisation_step():
    cfg = default_config("acpec")
    t = Par(Seq(Action("a"), Action("d")), Seq(Action("b"), Action("d")))
    moves = step(t, cfg).trans
    assert (TOP, "c", Par(Action("d"), Action("d"))) in moves


def test_cts_examples():
    cfg = default_config("acpec")
    T = cts_of(parse_proc("a . b", cfg), cfg)
    assert len(T.states) == 3
    assert [(c, x) for _, c, x, _ in T.trans] == [(TOP, "a"), (TOP, "b")]
    last = T.states[-1]
    assert T.terms(last) == [TOP]

    spec = RecSpec.make("E", {"X": Seq(Action("a"), Var("X"))})
    L = cts_of(RecConst("X", spec), cfg)
    assert len(L.states) == 1 and L.trans == [(L.init, TOP, "a", L.init)]

    p = atom("p")
    S = cts_of(parse_proc("p -> a + ~p -> a", cfg), cfg)
    assert {c for c, _, _ in S.out(S.init)} == {p, ~p}


def test_limits_flag_truncation():
    cfg = default_config("acpec")
    T = cts_of(parse_proc("a . b . c . d", cfg), cfg, max_states=2)
    assert T.exhausted and len(T.states) == 2
    assert not cts_of(parse_proc("a . b", cfg), cfg).exhausted
    D = cts_of(parse_proc("a . b . c", cfg), cfg, max_depth=1)
    assert D.exhausted


def test_unguarded_recursion_is_rejected():
    cfg = default_config("acpec")
    spec = RecSpec.make("E", {"X": Alt(Var("X"), Action("a"))})
    with pytest.raises(UnguardedError):
        cts_of(RecConst("X", spec), cfg)


def test_signals_of_sequential_composition():
    cfg = default_config("acpecs")
    p, q = atom("p"), atom("q")
    # the second operand's signal matters only where the first can terminate
    assert signal(Seq(Emit(p, EPS), Emit(q, Action("a"))), cfg) == p & q
    assert signal(Seq(Emit(p, Action("b")), Emit(q, Action("a"))), cfg) == p
    assert signal(Seq(Guard(q, EPS), NEX), cfg) == ~q


def test_recursion_through_signals_terminates():
    cfg = default_config("acpecs")
    spec = RecSpec.make("E", {"X": Emit(atom("p"), Seq(Action("a"), Var("X")))})
    T = cts_of(RecConst("X", spec), cfg)
    assert len(T.states) == 1 and T.sgn[T.init] == atom("p")


@pytest.mark.parametrize("variant", ["acpec", "acpecs", "acpecr", "acpecr_lastaction"])
@given(seed=st.integers(0, 10**6))
def test_no_bottom_labels(variant, seed):
    cfg = default_config(variant)
    T = cts_of(TermGen(cfg, random.Random(seed), depth=4).term(), cfg)
    ex = cfg.exclusive
    assert not any(is_bot(c, ex) for _, c, _, _ in T.trans)
    assert not any(is_bot(c, ex) for _, c in T.term)


@given(seed=st.integers(0, 10**6))
def test_signal_consistency(seed):
    cfg = default_config("acpecs")
    T = cts_of(TermGen(cfg, random.Random(seed), depth=4).term(), cfg)
    for s, c, a, t in T.trans:
        assert not is_bot(T.sgn[s]) and not is_bot(T.sgn[t])
    for s, c in T.term:
        assert not is_bot(T.sgn[s])
