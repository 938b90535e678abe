"""Non-deterministic chains and chain-based decompositions.

A transition subrelation over a symbol subset ``Omega`` is a chain when

* distinct symbols of ``Omega`` have disjoint source sets, and
* no state is entered twice inside the subrelation (each target has a
  unique ``(source, symbol)`` predecessor).

A machine whose symbols can be grouped into chains admits decentralized
estimation that is exact for *any* consistent decomposition of each group,
provided label classes never straddle two groups.  The decomposition built
here namespaces labels per chain to guarantee that.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Mapping, Sequence

from .core import Machine
from .decomposition import AggregationMap, Decomposition
from .errors import InputError, NotChainDecomposable, NotIsMachine


@dataclass(frozen=True)
class ChainViolation:
    kind: str  # "shared-source" or "shared-target"
    symbols: tuple
    states: tuple
    message: str


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def is_chain(m: Machine, omega: Sequence[str]) -> list[ChainViolation]:
    """Violations of the chain conditions for ``omega``; empty means it is a chain.

    The source condition is checked in its set form (``chi`` restricted to
    ``omega`` is absolutely injective), which is stronger than requiring
    that no state reaches the same target under two symbols.  Violations
    that only fail the set form say so in their message.
    """
    omega = list(dict.fromkeys(omega))
    ids = m.symbol_ids(omega)
    violations = []
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            shared = m.source_masks[ids[a]] & m.source_masks[ids[b]]
            for i in _bits(shared):
                same_target = m.succ_rows[ids[a]][i] & m.succ_rows[ids[b]][i]
                note = "" if same_target else " (a shared target is not required; sources alone must be disjoint)"
                violations.append(
                    ChainViolation(
                        "shared-source",
                        (omega[a], omega[b]),
                        (m.states[i],),
                        f"state {m.states[i]!r} fires both {omega[a]!r} and {omega[b]!r}{note}",
                    )
                )
    # every target entered at most once inside the subrelation
    for x in range(m.n_states):
        incoming = []
        for sym, sid in zip(omega, ids):
            for src in _bits(m.pred_rows[sid][x]):
                incoming.append((m.states[src], sym))
        for k in range(1, len(incoming)):
            (s1, w1), (s2, w2) = incoming[0], incoming[k]
            violations.append(
                ChainViolation(
                    "shared-target",
                    (w1, w2),
                    (s1, s2, m.states[x]),
                    f"target {m.states[x]!r} entered by ({s1!r}, {w1!r}) and ({s2!r}, {w2!r})",
                )
            )
    return violations


def check_chain_decomposable(m: Machine):
    """``None`` when every symbol's successor map is backward injective.

    Otherwise returns ``(symbol, target, (source1, source2))``.
    """
    for sid, sym in enumerate(m.symbols):
        for x, preds in enumerate(m.pred_rows[sid]):
            if preds & (preds - 1):
                srcs = list(_bits(preds))
                return sym, m.states[x], (m.states[srcs[0]], m.states[srcs[1]])
    return None


@dataclass(frozen=True)
class ChainPartition:
    machine: Machine
    blocks: tuple  # tuple of symbol tuples

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))
        flat = [w for b in self.blocks for w in b]
        if any(not b for b in self.blocks):
            raise InputError("chain partition has an empty block")
        if len(flat) != len(set(flat)) or set(flat) != set(self.machine.symbols):
            raise InputError("chain blocks must partition the symbol alphabet")

    @property
    def r(self):
        return len(self.blocks)

    def block_of(self, symbol):
        for j, block in enumerate(self.blocks):
            if symbol in block:
                return j
        raise InputError(f"unknown symbol {symbol!r}")

    def delta(self, j):
        """Transitions of block ``j`` (0-based)."""
        block = set(self.blocks[j])
        return tuple(tr for tr in self.machine.transitions if tr[1] in block)


def conflict_graph(m: Machine) -> dict:
    """Symbols that cannot share a chain: overlapping sources or targets."""
    edges = {w: set() for w in m.symbols}
    src, dst = m.source_masks, m.target_masks
    for a, wa in enumerate(m.symbols):
        for b in range(a + 1, len(m.symbols)):
            if src[a] & src[b] or dst[a] & dst[b]:
                edges[wa].add(m.symbols[b])
                edges[m.symbols[b]].add(wa)
    return edges


def partition_chains(m: Machine) -> ChainPartition:
    """First-fit colouring of the conflict graph in symbol declaration order."""
    witness = check_chain_decomposable(m)
    if witness is not None:
        raise NotChainDecomposable(witness)
    edges = conflict_graph(m)
    blocks: list[list[str]] = []
    for w in m.symbols:
        for block in blocks:
            if not any(v in edges[w] for v in block):
                block.append(w)
                break
        else:
            blocks.append([w])
    return ChainPartition(m, blocks)


def _radices(count, p):
    r = 1
    while r**p < count:
        r += 1
    radices = [r] * p
    for i in range(p):
        while radices[i] > 1:
            trial = radices[:i] + [radices[i] - 1] + radices[i + 1 :]
            if prod(trial) < count:
                break
            radices = trial
    return radices


def decompose_chain(omega: Sequence[str], p: int, namespace) -> tuple[list[tuple], dict]:
    """Give each symbol of ``omega`` a distinct ``p``-tuple of labels.

    Symbol ``i`` (in the given order) is written in mixed radix with the
    last factor least significant; digit ``d`` of factor ``k`` becomes the
    label ``"{namespace}:{k}:{d}"``.  Returns the per-factor alphabets and
    the symbol -> tuple assignment.
    """
    if not isinstance(p, int) or p < 1:
        raise InputError(f"p must be a positive integer, got {p!r}")
    omega = list(omega)
    radices = _radices(len(omega), p)
    assignment = {}
    alphabets = [[] for _ in range(p)]
    for idx, w in enumerate(omega):
        digits = []
        rest = idx
        for r in reversed(radices):
            digits.append(rest % r)
            rest //= r
        digits.reverse()
        labels = tuple(f"{namespace}:{k}:{d}" for k, d in enumerate(digits, start=1))
        assignment[w] = labels
        for k, label in enumerate(labels):
            if label not in alphabets[k]:
                alphabets[k].append(label)
    return [tuple(a) for a in alphabets], assignment


def build_decomposition(m: Machine, cp: ChainPartition, p: int) -> Decomposition:
    """Factor every chain block into ``p`` label alphabets and take unions."""
    maps = [{} for _ in range(p)]
    for j, block in enumerate(cp.blocks, start=1):
        _, assignment = decompose_chain(block, p, j)
        for w, labels in assignment.items():
            for k in range(p):
                maps[k][w] = labels[k]
    return Decomposition(AggregationMap(mp, k, m.symbols) for k, mp in enumerate(maps, start=1))


def chain_decomposition(m: Machine, p: int) -> Decomposition:
    return build_decomposition(m, partition_chains(m), p)


@dataclass(frozen=True)
class IsMachineView:
    """Machine over ``W = U x Y`` with single-valued output map."""

    machine: Machine
    inputs: tuple
    outputs: tuple
    factor: Mapping  # symbol -> (input, output)

    def f(self, state, u):
        m = self.machine
        return {dst for src, sym, dst in m.transitions if src == state and self.factor[sym][0] == u}

    def h(self, state, u):
        outs = {self.factor[sym][1] for src, sym, _ in self.machine.transitions if src == state and self.factor[sym][0] == u}
        return next(iter(outs)) if outs else None

    @classmethod
    def from_machine(cls, m: Machine, factor: Mapping | None = None, sep: str = "/", inputs=None, outputs=None):
        """Build the view; symbols are split on ``sep`` unless ``factor`` is given."""
        if factor is None:
            factor = {}
            for w in m.symbols:
                parts = w.split(sep)
                if len(parts) != 2:
                    raise NotIsMachine(f"symbol {w!r} does not split as input{sep}output")
                factor[w] = tuple(parts)
        else:
            factor = {w: tuple(factor[w]) for w in m.symbols}
        pairs = {}
        for w, pair in factor.items():
            if pair in pairs:
                raise NotIsMachine(f"symbols {pairs[pair]!r} and {w!r} share the pair {pair!r}")
            pairs[pair] = w
        us = tuple(dict.fromkeys(u for u, _ in factor.values()))
        ys = tuple(dict.fromkeys(y for _, y in factor.values()))
        if inputs is not None:
            bad = [u for u in us if u not in inputs]
            if bad:
                raise NotIsMachine(f"input {bad[0]!r} not among declared inputs")
            us = tuple(u for u in inputs if u in us)
        if outputs is not None:
            bad = [y for y in ys if y not in outputs]
            if bad:
                raise NotIsMachine(f"output {bad[0]!r} not among declared outputs")
        view = cls(m, us, ys, factor)
        view._validate()
        return view

    def _validate(self):
        m = self.machine
        outs = {}
        for src, sym, _ in m.transitions:
            u, y = self.factor[sym]
            outs.setdefault((src, u), set()).add(y)
        for (src, u), ys in outs.items():
            if len(ys) > 1:
                raise NotIsMachine(f"output map not single-valued at state {src!r}, input {u!r}: {sorted(ys)}")
        # every reachable state accepts every input
        reach = set(m.initial)
        frontier = list(reach)
        while frontier:
            x = frontier.pop()
            for src, _, dst in m.transitions:
                if src == x and dst not in reach:
                    reach.add(dst)
                    frontier.append(dst)
        for x in m.states:
            if x not in reach:
                continue
            for u in self.inputs:
                if (x, u) not in outs:
                    raise NotIsMachine(f"reachable state {x!r} has no transition for input {u!r}")


def iso_partition(view: IsMachineView) -> ChainPartition:
    """One block per input symbol; each block must be a chain."""
    blocks = [[w for w in view.machine.symbols if view.factor[w][0] == u] for u in view.inputs]
    cp = ChainPartition(view.machine, [b for b in blocks if b])
    for block in cp.blocks:
        violations = is_chain(view.machine, block)
        if violations:
            raise NotChainDecomposable(
                violations,
                f"successor map of input {view.factor[block[0]][0]!r} is not injective: {violations[0].message}",
            )
    return cp
