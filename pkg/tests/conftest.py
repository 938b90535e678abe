import pytest
from hypothesis import strategies as st

from symest import Machine, data_path
from symest.decomposition import AggregationMap, Decomposition
from symest.io import load_decomposition, load_machine


@pytest.fixture
def chain_machine():
    return load_machine(data_path("chain_machine.json"))


@pytest.fixture
def chain_decomp():
    return load_decomposition(data_path("chain_decomposition.json"))


@pytest.fixture
def nonchain_machine():
    return load_machine(data_path("nonchain_machine.json"))


@pytest.fixture
def two_chain_machine():
    return load_machine(data_path("two_chain_machine.json"))


@pytest.fixture
def two_chain_decomp():
    return load_decomposition(data_path("two_chain_decomposition.json"))


@pytest.fixture
def merge_machine():
    return load_machine(data_path("merge_machine.json"))


@st.composite
def machines(draw, max_states=6, max_symbols=4, full_initial=False):
    n = draw(st.integers(1, max_states))
    k = draw(st.integers(1, max_symbols))
    states = [f"s{i}" for i in range(n)]
    symbols = [f"w{j}" for j in range(k)]
    triples = [(x, w, y) for x in states for w in symbols for y in states]
    chosen = draw(st.lists(st.sampled_from(triples), unique=True, max_size=min(len(triples), 3 * n * k)))
    initial = None if full_initial else draw(st.lists(st.sampled_from(states), unique=True, min_size=1))
    return Machine(states, symbols, chosen, initial)


@st.composite
def machine_and_trace(draw, max_len=6, **kw):
    m = draw(machines(**kw))
    syms = draw(st.lists(st.sampled_from(m.symbols), min_size=1, max_size=max_len))
    return m, syms


@st.composite
def decompositions(draw, symbols):
    """Random consistent decomposition: coarse maps plus a separating one."""
    p = draw(st.integers(1, 3))
    maps = []
    for k in range(p - 1):
        maps.append({w: f"k{k}:{draw(st.integers(0, 2))}" for w in symbols})
    groups = {}
    for w in symbols:
        groups.setdefault(tuple(mp[w] for mp in maps), []).append(w)
    last = {}
    for members in groups.values():
        for i, w in enumerate(members):
            last[w] = f"last:{i}"
    maps.append(last)
    return Decomposition(AggregationMap(mp, k, symbols) for k, mp in enumerate(maps, start=1))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
