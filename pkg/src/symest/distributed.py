"""Distributed machines and the conjunctive decentralized estimator.

Each aggregation map ``A_k`` of a decomposition induces a machine ``P_k``
over the same states, whose transitions are those of the base machine
with symbols replaced by their labels.  Every ``P_k`` runs its own
estimator on the aggregated observation; the decentralized estimate is the
intersection of the ``p`` results.  It always contains the monolithic
estimate and equals it when the decomposition respects a chain partition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Machine, StateSet, Trace
from .decomposition import AggregationMap, Decomposition, aggregate_trace
from .errors import InputError
from .estimator import as_trace, estimate_and_predict, estimate_steps, prior_mask
from .kernels import compare_exhaustive


@dataclass(frozen=True)
class DistributedFamily:
    base: Machine
    decomposition: Decomposition
    machines: tuple

    @property
    def p(self):
        return len(self.machines)

    def aggregate(self, w) -> list[Trace]:
        trace = as_trace(w)
        return [aggregate_trace(a, trace) for a in self.decomposition.maps]


def distributed_machine(m: Machine, a: AggregationMap) -> Machine:
    """Relabel the transitions of ``m`` through ``a``, merging duplicates."""
    seen = set()
    transitions = []
    for src, sym, dst in m.transitions:
        tr = (src, a(sym), dst)
        if tr not in seen:
            seen.add(tr)
            transitions.append(tr)
    return Machine(m.states, a.labels, transitions, m.initial)


def derive_distributed(m: Machine, d) -> DistributedFamily:
    if not isinstance(d, Decomposition):
        d = Decomposition(d)
    if set(d.symbols) != set(m.symbols):
        raise InputError("decomposition alphabet differs from the machine's symbols")
    machines = tuple(distributed_machine(m, a) for a in d.maps)
    return DistributedFamily(m, d, machines)


def distributed_sets(f: DistributedFamily, w) -> list[tuple[StateSet, StateSet]]:
    """Per-machine ``(chi_k, rho_k)`` before intersection."""
    return [estimate_and_predict(pk, vk) for pk, vk in zip(f.machines, f.aggregate(w))]


def decentralized_estimate_and_predict(f: DistributedFamily, w) -> tuple[StateSet, StateSet]:
    chi = rho = f.base.full_mask
    for c, r in distributed_sets(f, w):
        chi &= c.mask
        rho &= r.mask
    return f.base.wrap(chi), f.base.wrap(rho)


def decentralized_estimate(f: DistributedFamily, w) -> StateSet:
    return decentralized_estimate_and_predict(f, w)[0]


def decentralized_predict(f: DistributedFamily, w) -> StateSet:
    return decentralized_estimate_and_predict(f, w)[1]


def decentralized_steps(f: DistributedFamily, w):
    """Per time step: ``(per_k [(chi_k, rho_k)], chi, rho)`` after each prefix."""
    per_k = [estimate_steps(pk, vk) for pk, vk in zip(f.machines, f.aggregate(w))]
    out = []
    for step in zip(*per_k):
        chi = rho = f.base.full_mask
        for c, r in step:
            chi &= c.mask
            rho &= r.mask
        out.append((list(step), f.base.wrap(chi), f.base.wrap(rho)))
    return out


def exhaustive_agreement(f: DistributedFamily, max_len: int, tau: int = 0, backend=None):
    """Check decentralized == monolithic on every accepted trace up to ``max_len``.

    Returns ``(checks, None)`` or ``(checks, trace)`` for the first trace on
    which estimate or prediction differ.
    """
    m = f.base
    base = m.kernel_tables(backend)
    parts = [pk.kernel_tables(base.backend) for pk in f.machines]
    symmap = [[pk.symbol_index[a(w)] for w in m.symbols] for pk, a in zip(f.machines, f.decomposition.maps)]
    checks, path = compare_exhaustive(base, parts, symmap, max_len, prior_mask(m, tau))
    if path is None:
        return checks, None
    return checks, Trace(tuple(m.symbols[s] for s in path), tau)
