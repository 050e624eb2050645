import pytest

from acpkit.bisim import retro_split_bisim
from acpkit.errors import DeclarationError
from acpkit.service import ReplyFunction, default_reply, reachable, service_config, service_spec
from acpkit.sos import cts_of
from acpkit.terms import RecConst, guardedness_check


def test_reply_function_validation():
    G = default_reply()
    assert G(("m1",)) == "T" and G(("m1", "m2")) == "B" and G(("m1", "m2", "m1")) == "B"
    with pytest.raises(DeclarationError, match="undefined"):
        ReplyFunction(("m1",), {("m1",): "T"})
    with pytest.raises(DeclarationError, match="not one of"):
        ReplyFunction.parse(("m1",), "m1=T,m1.m1=X")
    with pytest.raises(DeclarationError, match="blocked after"):
        ReplyFunction.parse(("m1", "m2"), "m1=B,m2=T,m1.m1=B,m1.m2=T,m2.m1=T,m2.m2=T")


def test_derivation():
    G = default_reply()
    D = G.derive("m1")
    assert D(("m1",)) == "F" and D(("m2",)) == "B"
    assert D == ReplyFunction.parse(G.commands, "m1=F,m2=B,m1.m1=F,m1.m2=F,m2.m1=B,m2.m2=B")
    assert len(reachable(G)) == 5


def test_service_is_guarded_and_finite():
    G = default_reply()
    spec, x = service_spec(G)
    cfg = service_config(G.commands)
    assert guardedness_check(spec, cfg)[0]
    T = cts_of(RecConst(x, spec), cfg)
    assert not T.exhausted and len(T.states) == 21


def test_service_satisfies_its_equations():
    G = default_reply()
    spec, x = service_spec(G)
    cfg = service_config(G.commands)
    T = cts_of(RecConst(x, spec), cfg)
    U = cts_of(spec.body(x), cfg)
    assert retro_split_bisim(T, U, "last_action").related
