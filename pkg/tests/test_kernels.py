import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symest import kernels
from symest.chains import chain_decomposition
from symest.distributed import derive_distributed, exhaustive_agreement
from symest.verify import GenConfig, random_machine

from conftest import machine_and_trace

needs_native = pytest.mark.skipif(not kernels.NATIVE_AVAILABLE, reason="compiled kernel not built")


@needs_native
@given(machine_and_trace(max_states=8, max_len=8))
def test_backends_agree_on_runs(case):
    m, syms = case
    ids = m.symbol_ids(syms)
    py = m.kernel_tables("python")
    cy = m.kernel_tables("cython")
    for prior in (m.full_mask, m.initial_mask, 0):
        assert py.run(ids, prior) == cy.run(ids, prior)
        assert py.run_steps(ids, prior) == cy.run_steps(ids, prior)
        assert py.image_many(ids, prior) == cy.image_many(ids, prior)


@needs_native
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_backends_agree_on_exhaustive_walk(seed):
    m = random_machine(GenConfig(seed=seed, max_states=7, max_symbols=4, chain_decomposable=True))
    f = derive_distributed(m, chain_decomposition(m, 2))
    assert exhaustive_agreement(f, 5, backend="python") == exhaustive_agreement(f, 5, backend="cython")


def test_empty_run_returns_prior():
    m_tables = kernels.KernelTables(2, [[1, 2]], [3], backend="python")
    assert m_tables.run([], 3) == (3, 3)


def test_backend_selection():
    t = kernels.KernelTables(1, [[1]], [1])
    assert t.backend == kernels.backend_name()
    with pytest.raises(ValueError):
        kernels.KernelTables(1, [[1]], [1], backend="fortran")


@needs_native
def test_large_machine_falls_back_to_python():
    n = kernels.NATIVE_MAX_STATES + 1
    t = kernels.KernelTables(n, [[0] * n], [0])
    assert t.backend == "python"
    with pytest.raises(ValueError):
        kernels.KernelTables(n, [[0] * n], [0], backend="cython")


def test_exhaustive_detects_disagreement():
    # base accepts "a" only from state 0; the single part claims both states
    base = kernels.KernelTables(2, [[2, 0]], [1], backend="python")
    part = kernels.KernelTables(2, [[2, 2]], [3], backend="python")
    checks, path = kernels.compare_exhaustive(base, [part], [[0]], 3, 3)
    assert path == [0] and checks == 1
