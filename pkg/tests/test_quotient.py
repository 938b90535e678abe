import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symest import (
    Machine,
    NotChainDecomposable,
    QuotientMap,
    build_quotient,
    check_chain_decomposable,
    decentralized_estimate,
    decentralized_predict,
    derive_distributed,
    estimate,
    merge_relation,
    partition_chains,
    predict,
    quotient_decomposition,
    quotient_pipeline,
)
from symest.distributed import exhaustive_agreement
from symest.errors import InputError
from symest.estimator import estimate_and_predict
from symest.quotient import merge_pairs
from symest.verify import GenConfig, random_machine


def test_nonchain_merges_everything(nonchain_machine):
    q = merge_relation(nonchain_machine)
    assert q.classes == (("z1", ("x1", "x2", "x3")),)


def test_permutation_automaton_stays_singleton():
    perm = Machine(["p", "q", "r"], ["s"], [("p", "s", "q"), ("q", "s", "r"), ("r", "s", "p")])
    assert merge_relation(perm).is_identity()
    assert merge_pairs(perm) == set()


def test_merge_machine_classes(merge_machine):
    q = merge_relation(merge_machine)
    assert [ms for _, ms in q.classes] == [("xi1", "xi2"), ("xi3",), ("xi4", "xi5"), ("xi6", "xi7")]


def test_quotient_of_nonchain(nonchain_machine):
    t = build_quotient(nonchain_machine, merge_relation(nonchain_machine)).machine
    assert t.states == ("z1",) and t.transitions == (("z1", "a", "z1"),)
    assert check_chain_decomposable(t) is None


def test_identity_quotient_is_isomorphic(two_chain_machine):
    q = QuotientMap.identity(two_chain_machine.states)
    t = build_quotient(two_chain_machine, q).machine
    rename = {z: ms[0] for z, ms in q.classes}
    assert {(rename[a], w, rename[b]) for a, w, b in t.transitions} == set(two_chain_machine.transitions)


def test_total_quotient(merge_machine):
    t = build_quotient(merge_machine, QuotientMap.total(merge_machine.states)).machine
    assert set(t.transitions) == {("z1", w, "z1") for w in merge_machine.symbols}


def test_quotient_initial_states():
    m = Machine(["a", "b", "c"], ["s"], [("a", "s", "c"), ("b", "s", "c")], initial=["b"])
    qm = build_quotient(m, merge_relation(m))
    assert qm.machine.initial == ("z1",)


def test_bad_quotient_maps(chain_machine):
    with pytest.raises(InputError):
        QuotientMap(("x1", "x2"), [("z1", ("x1",))])
    with pytest.raises(InputError):
        QuotientMap(("x1", "x2"), [("z1", ("x1", "x2")), ("z2", ("x2",))])
    with pytest.raises(InputError):
        build_quotient(chain_machine, QuotientMap.identity(("x1",)))


def test_pipeline_nonchain_p1(nonchain_machine):
    result = quotient_pipeline(nonchain_machine, 1)
    assert result.iterations == 1 and result.decomposition.p == 1
    f = derive_distributed(nonchain_machine, result.decomposition)
    assert exhaustive_agreement(f, 6)[1] is None


def test_pipeline_merge_machine(merge_machine):
    result = quotient_pipeline(merge_machine, 2)
    assert sorted(sorted(b) for b in result.partition.blocks) == [["a", "e"], ["b", "c", "d"], ["f"]]
    f = derive_distributed(merge_machine, result.decomposition)
    checks, bad = exhaustive_agreement(f, 5)
    assert bad is None and checks > 0


def test_pipeline_on_chain_decomposable_input(two_chain_machine):
    d = quotient_decomposition(two_chain_machine, 2)
    assert exhaustive_agreement(derive_distributed(two_chain_machine, d), 5)[1] is None


def test_pipeline_gives_up_with_counterexample_candidate(nonchain_machine, monkeypatch, caplog):
    import symest.quotient as qmod

    monkeypatch.setattr(qmod, "merge_relation", lambda m: QuotientMap.identity(m.states))
    with caplog.at_level(logging.WARNING):
        with pytest.raises(NotChainDecomposable, match="counterexample candidate"):
            qmod.quotient_pipeline(nonchain_machine, 1)
    assert "coarsening again" in caplog.text


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**40), st.data())
def test_lifting_contains_base_sets(seed, data):
    m = random_machine(GenConfig(seed=seed, max_states=8, max_symbols=4, non_injective=True))
    result = quotient_pipeline(m, 2)
    qm = result.quotient
    assert result.iterations <= m.n_states
    syms = data.draw(st.lists(st.sampled_from(m.symbols), min_size=1, max_size=5))
    c, r = estimate_and_predict(m, syms)
    ct, rt = estimate_and_predict(qm.machine, syms)
    assert c <= qm.lift(ct) and r <= qm.lift(rt)
    assert qm.project(c) <= ct
    # symbols sharing a block have disjoint sources in the base machine too
    for block in result.partition.blocks:
        for i, a in enumerate(block):
            for b in block[i + 1 :]:
                assert not m.source_masks[m.symbol_id(a)] & m.source_masks[m.symbol_id(b)]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**40), st.integers(1, 3))
def test_pipeline_exact(seed, p):
    m = random_machine(GenConfig(seed=seed, max_states=8, max_symbols=5, non_injective=True))
    d = quotient_decomposition(m, p)
    assert check_chain_decomposable(quotient_pipeline(m, p).quotient.machine) is None
    assert exhaustive_agreement(derive_distributed(m, d), 4)[1] is None
    w = ["w1"] * 3
    f = derive_distributed(m, d)
    assert (decentralized_estimate(f, w), decentralized_predict(f, w)) == (estimate(m, w), predict(m, w))
    assert partition_chains(quotient_pipeline(m, p).quotient.machine).r >= 1
