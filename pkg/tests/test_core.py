import pytest
from hypothesis import given
from hypothesis import strategies as st

from symest import Machine, MachineError, Trace, enabled_states, enumerate_paths, successors
from symest.errors import InputError

from conftest import machines


def test_enabled_states(chain_machine, nonchain_machine):
    assert enabled_states(chain_machine, "a1").names() == ["x1"]
    assert enabled_states(nonchain_machine, "a").names() == ["x1", "x2", "x3"]


def test_enabled_states_of_unused_symbol_is_empty():
    m = Machine(["x"], ["a", "b"], [("x", "a", "x")])
    assert not enabled_states(m, "b")


def test_enabled_states_unknown_symbol(chain_machine):
    with pytest.raises(InputError):
        enabled_states(chain_machine, "zz")


def test_successors(chain_machine, nonchain_machine):
    assert successors(chain_machine, {"a1"}, ["x1"]).names() == ["x2"]
    assert not successors(chain_machine, ["a1", "b1"], [])
    assert successors(nonchain_machine, "a", ["x1", "x2"]).names() == ["x3"]


def test_enumerate_paths(chain_machine, nonchain_machine):
    assert enumerate_paths(chain_machine, Trace("a1 b1")) == {("x1", "x3")}
    assert enumerate_paths(chain_machine, []) == {(x, x) for x in chain_machine.states}
    assert enumerate_paths(nonchain_machine, ["a"]) == {("x1", "x3"), ("x2", "x3"), ("x3", "x3")}


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(states=[], symbols=["a"], transitions=[]),
        dict(states=["x"], symbols=[], transitions=[]),
        dict(states=["x", "x"], symbols=["a"], transitions=[]),
        dict(states=["x"], symbols=["a"], transitions=[("x", "a", "y")]),
        dict(states=["x"], symbols=["a"], transitions=[("x", "b", "x")]),
        dict(states=["x"], symbols=["a"], transitions=[("x", "a", "x"), ("x", "a", "x")]),
        dict(states=["x"], symbols=["a"], transitions=[], initial=["y"]),
        dict(states=["x"], symbols=["a"], transitions=[("x", "a")]),
    ],
)
def test_machine_rejects_invalid(kwargs):
    with pytest.raises(MachineError):
        Machine(**kwargs)


def test_blocking_machines_are_allowed():
    m = Machine(["x", "y"], ["a"], [("x", "a", "y")], initial=["x"])
    assert not m.is_non_blocking()
    assert m.initial == ("x",)


def test_stateset_algebra(chain_machine):
    a = chain_machine.stateset(["x1", "x2"])
    b = chain_machine.stateset(["x2", "x3"])
    assert (a & b).names() == ["x2"]
    assert (a | b).names() == ["x1", "x2", "x3"]
    assert (a - b).names() == ["x1"]
    assert a & b < a and not a < a and a <= a
    assert "x1" in a and "x4" not in a and "nope" not in a
    assert str(a) == "{x1, x2}"
    assert len(a | b) == 3


def test_stateset_from_other_machine_rejected(chain_machine, nonchain_machine):
    with pytest.raises(InputError):
        chain_machine.all_states() & nonchain_machine.all_states()


def test_trace_windows():
    w = Trace("a b c", tau=2)
    assert w.t == 4
    assert w.window(3) == Trace(("b", "c"), 3)
    assert len(w.window(5)) == 0
    with pytest.raises(InputError):
        w.window(1)
    with pytest.raises(InputError):
        Trace("a", tau=-1)


@given(machines())
def test_enabled_states_are_first_components_of_paths(m):
    for w in m.symbols:
        firsts = {a for a, _ in enumerate_paths(m, [w])}
        assert set(enabled_states(m, w)) == firsts
        lasts = {b for _, b in enumerate_paths(m, [w])}
        assert set(successors(m, [w], enabled_states(m, w))) == lasts


@given(machines(), st.data())
def test_successors_monotone(m, data):
    big_syms = data.draw(st.lists(st.sampled_from(m.symbols), unique=True))
    small_syms = data.draw(st.lists(st.sampled_from(big_syms), unique=True)) if big_syms else []
    big = data.draw(st.lists(st.sampled_from(m.states), unique=True))
    small = data.draw(st.lists(st.sampled_from(big), unique=True)) if big else []
    assert successors(m, small_syms, small) <= successors(m, big_syms, big)
