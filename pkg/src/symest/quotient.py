"""State-space aggregation and the quotient-machine decomposition pipeline.

Two states are merged when some non-empty string drives both into a
common state.  The merge pairs are found by a backward breadth-first
search on the synchronized product graph, starting from the diagonal,
and closed under transitivity with a union-find.  The quotient machine
over the classes is then checked for chain-decomposability; if the
closure broke it, the relation is recomputed on the quotient and the
classes coarsened until it holds.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from .chains import ChainPartition, build_decomposition, check_chain_decomposable, partition_chains
from .core import Machine, StateSet
from .decomposition import Decomposition
from .errors import InputError, NotChainDecomposable

log = logging.getLogger(__name__)


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass(frozen=True)
class QuotientMap:
    """Surjection from base states onto class labels."""

    states: tuple
    classes: tuple  # ((label, (member, ...)), ...) in label order
    label_of: dict = field(repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "classes", tuple((z, tuple(ms)) for z, ms in self.classes))
        label_of = {}
        for z, members in self.classes:
            if not members:
                raise InputError(f"class {z!r} is empty")
            for x in members:
                if x in label_of:
                    raise InputError(f"state {x!r} appears in two classes")
                label_of[x] = z
        if set(label_of) != set(self.states) or len(label_of) != len(self.states):
            missing = [x for x in self.states if x not in label_of]
            raise InputError(f"classes do not partition the states (missing {missing[:3]})")
        labels = [z for z, _ in self.classes]
        if len(set(labels)) != len(labels):
            raise InputError("duplicate class label")
        object.__setattr__(self, "label_of", label_of)

    @classmethod
    def from_groups(cls, states, groups, prefix="z"):
        """Label groups ``z1, z2, ...`` ordered by their first member."""
        order = {x: i for i, x in enumerate(states)}
        groups = [sorted(g, key=order.__getitem__) for g in groups]
        groups.sort(key=lambda g: order[g[0]])
        return cls(states, [(f"{prefix}{i}", tuple(g)) for i, g in enumerate(groups, start=1)])

    @classmethod
    def identity(cls, states):
        return cls.from_groups(states, [[x] for x in states])

    @classmethod
    def total(cls, states):
        return cls.from_groups(states, [list(states)])

    @property
    def labels(self):
        return tuple(z for z, _ in self.classes)

    def members(self, label):
        for z, ms in self.classes:
            if z == label:
                return ms
        raise InputError(f"unknown class {label!r}")

    def __call__(self, state):
        try:
            return self.label_of[state]
        except KeyError:
            raise InputError(f"unknown state {state!r}") from None

    def then(self, outer: "QuotientMap") -> "QuotientMap":
        """Compose with a quotient map defined on this map's labels."""
        groups = {}
        for x in self.states:
            groups.setdefault(outer(self(x)), []).append(x)
        return QuotientMap.from_groups(self.states, list(groups.values()))

    def is_identity(self):
        return all(len(ms) == 1 for _, ms in self.classes)


def merge_pairs(m: Machine) -> set:
    """Unordered pairs of distinct states driven into one state by a common string."""
    n = m.n_states
    seen = set()
    queue = deque()

    def add(a, b):
        if a == b:
            return
        key = (a, b) if a < b else (b, a)
        if key not in seen:
            seen.add(key)
            queue.append(key)

    # one step onto the diagonal
    for preds_row in m.pred_rows:
        for x in range(n):
            preds = list(_bits(preds_row[x]))
            for i in range(len(preds)):
                for j in range(i + 1, len(preds)):
                    add(preds[i], preds[j])
    # backward along synchronized steps
    while queue:
        c, d = queue.popleft()
        for preds_row in m.pred_rows:
            pc, pd = preds_row[c], preds_row[d]
            if not pc or not pd:
                continue
            for a in _bits(pc):
                for b in _bits(pd):
                    add(a, b)
    return seen


def merge_relation(m: Machine) -> QuotientMap:
    """Equivalence classes of the transitive closure of the merge relation."""
    parent = list(range(m.n_states))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in sorted(merge_pairs(m)):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for i, x in enumerate(m.states):
        groups.setdefault(find(i), []).append(x)
    return QuotientMap.from_groups(m.states, list(groups.values()))


@dataclass(frozen=True)
class QuotientMachine:
    machine: Machine  # T over the class labels
    qmap: QuotientMap
    base: Machine

    def lift(self, zs) -> StateSet:
        """Preimage of a set of classes as a base state set."""
        names = zs if not isinstance(zs, StateSet) else zs.names()
        return self.base.stateset(x for z in names for x in self.qmap.members(z))

    def project(self, xs) -> StateSet:
        names = xs.names() if isinstance(xs, StateSet) else xs
        return self.machine.stateset(dict.fromkeys(self.qmap(x) for x in names))


def build_quotient(m: Machine, q: QuotientMap) -> QuotientMachine:
    if q.states != m.states:
        raise InputError("quotient map is defined on different states")
    seen = set()
    transitions = []
    for src, sym, dst in m.transitions:
        tr = (q(src), sym, q(dst))
        if tr not in seen:
            seen.add(tr)
            transitions.append(tr)
    initial = tuple(dict.fromkeys(q(x) for x in m.initial))
    order = {z: i for i, z in enumerate(q.labels)}
    initial = tuple(sorted(initial, key=order.__getitem__))
    t = Machine(q.labels, m.symbols, transitions, initial)
    return QuotientMachine(t, q, m)


@dataclass(frozen=True)
class QuotientPipeline:
    decomposition: Decomposition
    quotient: QuotientMachine
    partition: ChainPartition
    iterations: int


def quotient_pipeline(m: Machine, p: int, max_iterations: int | None = None) -> QuotientPipeline:
    """Quotient by the merge relation, partition the quotient into chains, factor.

    The returned decomposition is over the base alphabet and is meant for
    the base machine's distributed family.
    """
    limit = max_iterations or m.n_states
    q = merge_relation(m)
    t = build_quotient(m, q)
    iterations = 1
    while True:
        witness = check_chain_decomposable(t.machine)
        if witness is None:
            break
        if iterations >= limit:
            log.error("quotient still not chain-decomposable after %d iterations: %s", iterations, witness)
            raise NotChainDecomposable(
                witness, f"quotient not chain-decomposable after {iterations} iterations (counterexample candidate)"
            )
        log.warning("quotient not chain-decomposable after closure (witness %s); coarsening again", witness)
        q = q.then(merge_relation(t.machine))
        t = build_quotient(m, q)
        iterations += 1
    cp = partition_chains(t.machine)
    d = build_decomposition(m, cp, p)
    return QuotientPipeline(d, t, cp, iterations)


def quotient_decomposition(m: Machine, p: int) -> Decomposition:
    return quotient_pipeline(m, p).decomposition
