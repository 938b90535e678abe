import random

import pytest

import symest.verify as verify_mod
from symest import Trace, check_chain_decomposable
from symest.core import successors
from symest.errors import GenerationError, InputError
from symest.estimator import as_trace, predict, prior_mask
from symest.verify import (
    GenConfig,
    Report,
    random_decomposition,
    random_machine,
    sample_accepted,
    sample_rejected,
    shrink_trace,
    verify_chain_exactness,
    verify_monotonicity,
    verify_oracle,
    verify_overapprox,
    verify_quotient_exactness,
)


def small(**kw):
    base = dict(seed=1, min_states=4, max_states=4, min_symbols=3, max_symbols=3, density=0.3)
    base.update(kw)
    return GenConfig(**base)


def test_forced_chain_decomposable():
    m = random_machine(small(chain_decomposable=True))
    assert check_chain_decomposable(m) is None


def test_same_seed_same_machine():
    assert random_machine(small()) == random_machine(small())


def test_forced_non_injective():
    assert check_chain_decomposable(random_machine(small(non_injective=True))) is not None


def test_forced_non_blocking():
    for seed in range(20):
        assert random_machine(small(seed=seed, density=0.05, non_blocking=True)).is_non_blocking()


def test_dense_chain_machines_still_generate():
    m = random_machine(small(density=1.0, chain_decomposable=True, non_blocking=True))
    assert check_chain_decomposable(m) is None and m.is_non_blocking()


@pytest.mark.parametrize(
    "kw",
    [dict(min_states=0), dict(min_states=5, max_states=4), dict(density=1.5), dict(density=(0.5, 0.1)),
     dict(seed=-1), dict(max_trace_len=0)],
)
def test_bad_configs(kw):
    with pytest.raises(InputError):
        small(**kw)


def test_contradictory_flags():
    with pytest.raises(GenerationError):
        small(chain_decomposable=True, non_injective=True)


def test_non_injective_on_one_state_is_unsatisfiable():
    with pytest.raises(GenerationError):
        random_machine(small(min_states=1, max_states=1, non_injective=True))


def test_random_decomposition_is_consistent():
    rng = random.Random(3)
    for _ in range(50):
        d = random_decomposition(["a", "b", "c", "d", "e"], rng)
        assert d.p in (2, 3)


def test_samplers(chain_machine):
    rng = random.Random(0)
    w = sample_accepted(chain_machine, rng, 5)
    assert len(w) == 5 and predict(chain_machine, w)
    r = sample_rejected(chain_machine, rng, 3)
    assert r is not None and not predict(chain_machine, r)


def test_shrink_keeps_failure():
    w = Trace("a b c d e")
    fails = lambda t: "c" in t.symbols
    shrunk = shrink_trace(w, fails)
    assert shrunk.symbols == ("c",) and shrunk.tau == 2 and fails(shrunk)


def test_trials_must_be_positive():
    with pytest.raises(InputError):
        verify_oracle(small(), 0)


def test_trivial_machine_passes():
    cfg = GenConfig(seed=5, min_states=1, max_states=1, min_symbols=1, max_symbols=1, density=1.0, traces=3)
    for suite in (verify_oracle, verify_monotonicity, verify_overapprox, verify_chain_exactness):
        report = suite(cfg, 1)
        assert report.ok and report.trials == 1


@pytest.mark.parametrize("suite", [verify_oracle, verify_monotonicity, verify_overapprox,
                                   verify_chain_exactness, verify_quotient_exactness])
def test_suites_pass(suite):
    report = suite(GenConfig(seed=11, max_states=7, max_symbols=5, density=(0.1, 0.5), traces=10), 10)
    assert report.ok, report.render()
    assert report.instances > 0


def _broken_estimate(m, w):
    # drops the intersection with the enabled set at every step
    w = as_trace(w)
    cur = m.wrap(prior_mask(m, w.tau))
    for s in w.symbols[:-1]:
        cur = successors(m, [s], cur)
    return cur


def test_mutated_estimator_is_caught():
    report = verify_oracle(GenConfig(seed=2, max_states=6, max_symbols=4, traces=10), 5, estimate_fn=_broken_estimate)
    assert not report.ok
    f = report.failures[0]
    # the witness replays from its seed
    cfg = GenConfig(seed=2, max_states=6, max_symbols=4, traces=10)
    assert random_machine(cfg.with_seed(f.seed)) == f.machine
    assert _broken_estimate(f.machine, f.trace) != verify_mod.oracle_estimate(f.machine, f.trace)
    assert "witness" in report.render() and report.summary().startswith("FAIL")


def test_report_summary_format():
    r = Report("x", trials=2, instances=5, stats={"b": 1, "a": 2})
    assert r.summary() == "PASS x: trials=2 instances=5 failures=0 a=2 b=1"


def test_deterministic_reports():
    cfg = GenConfig(seed=9, max_states=6, traces=5)
    assert verify_overapprox(cfg, 5).render() == verify_overapprox(cfg, 5).render()
