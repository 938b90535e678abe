"""State machines, state sets and traces.

A :class:`Machine` is the tuple ``(X, W, Delta, X0)`` with string
identifiers.  Internally states and symbols are mapped to dense indices
and state sets are integer bitmasks over the state range.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InputError, MachineError
from .kernels import KernelTables


@dataclass(frozen=True)
class StateSet:
    """Subset of a machine's states, stored as a bitmask over ``universe``."""

    mask: int
    universe: tuple = field(repr=False)

    def _check(self, other):
        if not isinstance(other, StateSet):
            return NotImplemented
        if other.universe is not self.universe and other.universe != self.universe:
            raise InputError("state sets belong to different state spaces")
        return other

    def __and__(self, other):
        other = self._check(other)
        return StateSet(self.mask & other.mask, self.universe)

    def __or__(self, other):
        other = self._check(other)
        return StateSet(self.mask | other.mask, self.universe)

    def __sub__(self, other):
        other = self._check(other)
        return StateSet(self.mask & ~other.mask, self.universe)

    def __le__(self, other):
        other = self._check(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other):
        return self <= other and self.mask != other.mask

    def __ge__(self, other):
        return self._check(other) <= self

    def __gt__(self, other):
        return self._check(other) < self

    def __bool__(self):
        return self.mask != 0

    def __len__(self):
        return self.mask.bit_count()

    def __iter__(self):
        mask = self.mask
        while mask:
            low = mask & -mask
            yield self.universe[low.bit_length() - 1]
            mask ^= low

    def __contains__(self, state):
        try:
            i = self.universe.index(state)
        except ValueError:
            return False
        return bool(self.mask >> i & 1)

    def names(self):
        """Member names in state declaration order."""
        return list(self)

    def __str__(self):
        return "{" + ", ".join(self) + "}"

    def __repr__(self):
        return f"StateSet({self.names()!r})"


@dataclass(frozen=True)
class Trace:
    """Finite observed string ``w(tau) ... w(t)``."""

    symbols: tuple
    tau: int = 0

    def __post_init__(self):
        if isinstance(self.symbols, str):
            object.__setattr__(self, "symbols", tuple(self.symbols.split()))
        else:
            object.__setattr__(self, "symbols", tuple(self.symbols))
        if not isinstance(self.tau, int) or self.tau < 0:
            raise InputError(f"trace start index must be a non-negative integer, got {self.tau!r}")

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    @property
    def t(self):
        """Time index of the last symbol (``tau - 1`` for the empty trace)."""
        return self.tau + len(self.symbols) - 1

    def window(self, start):
        """Suffix starting at absolute time ``start``."""
        offset = start - self.tau
        if offset < 0 or offset > len(self.symbols):
            raise InputError(f"window start {start} outside [{self.tau}, {self.t + 1}]")
        return Trace(self.symbols[offset:], start)

    def prefix(self, length):
        return Trace(self.symbols[:length], self.tau)

    def __str__(self):
        return " ".join(self.symbols)


def _dedupe_check(items, what):
    seen = set()
    for item in items:
        if not isinstance(item, str):
            raise MachineError(f"{what} identifiers must be strings, got {item!r}")
        if item in seen:
            raise MachineError(f"duplicate {what} {item!r}")
        seen.add(item)


@dataclass(frozen=True)
class Machine:
    """Finite state machine ``(states, symbols, transitions, initial)``.

    ``initial`` defaults to all states.  Blocking machines are accepted;
    see :meth:`is_non_blocking`.
    """

    states: tuple
    symbols: tuple
    transitions: tuple
    initial: tuple = None

    def __post_init__(self):
        states = tuple(self.states)
        symbols = tuple(self.symbols)
        transitions = tuple(tuple(tr) for tr in self.transitions)
        initial = states if self.initial is None else tuple(self.initial)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "initial", initial)

        if not states:
            raise MachineError("machine needs at least one state")
        if not symbols:
            raise MachineError("machine needs at least one symbol")
        _dedupe_check(states, "state")
        _dedupe_check(symbols, "symbol")
        _dedupe_check(initial, "initial state")
        state_ix = self.state_index
        sym_ix = self.symbol_index
        for x in initial:
            if x not in state_ix:
                raise MachineError(f"initial state {x!r} is not a state")
        seen = set()
        for tr in transitions:
            if len(tr) != 3:
                raise MachineError(f"transition {tr!r} is not a (source, symbol, target) triple")
            src, sym, dst = tr
            if src not in state_ix:
                raise MachineError(f"transition {tr!r}: unknown source state {src!r}")
            if sym not in sym_ix:
                raise MachineError(f"transition {tr!r}: unknown symbol {sym!r}")
            if dst not in state_ix:
                raise MachineError(f"transition {tr!r}: unknown target state {dst!r}")
            if tr in seen:
                raise MachineError(f"duplicate transition {tr!r}")
            seen.add(tr)

    # -- indexing ---------------------------------------------------------

    @cached_property
    def state_index(self):
        return {x: i for i, x in enumerate(self.states)}

    @cached_property
    def symbol_index(self):
        return {w: i for i, w in enumerate(self.symbols)}

    @property
    def n_states(self):
        return len(self.states)

    def symbol_id(self, symbol):
        try:
            return self.symbol_index[symbol]
        except (KeyError, TypeError):
            raise InputError(f"unknown symbol {symbol!r}") from None

    def symbol_ids(self, symbols: Iterable[str]):
        return [self.symbol_id(w) for w in symbols]

    def mask_of(self, states: Iterable[str]):
        mask = 0
        for x in states:
            try:
                mask |= 1 << self.state_index[x]
            except (KeyError, TypeError):
                raise InputError(f"unknown state {x!r}") from None
        return mask

    def names_of(self, mask):
        return StateSet(mask, self.states).names()

    # -- state sets -------------------------------------------------------

    def stateset(self, states: Iterable[str] = ()):
        if isinstance(states, StateSet):
            self._own(states)
            return states
        return StateSet(self.mask_of(states), self.states)

    def _own(self, s: StateSet):
        if s.universe is not self.states and s.universe != self.states:
            raise InputError("state set does not belong to this machine")
        return s.mask

    def wrap(self, mask):
        return StateSet(mask, self.states)

    @cached_property
    def full_mask(self):
        return (1 << len(self.states)) - 1

    @cached_property
    def initial_mask(self):
        return self.mask_of(self.initial)

    def all_states(self):
        return self.wrap(self.full_mask)

    def initial_set(self):
        return self.wrap(self.initial_mask)

    # -- transition tables ------------------------------------------------

    @cached_property
    def succ_rows(self):
        """``succ_rows[sym][state]``: successor bitmask."""
        n = len(self.states)
        rows = [[0] * n for _ in self.symbols]
        for src, sym, dst in self.transitions:
            rows[self.symbol_index[sym]][self.state_index[src]] |= 1 << self.state_index[dst]
        return rows

    @cached_property
    def pred_rows(self):
        """``pred_rows[sym][state]``: predecessor bitmask."""
        n = len(self.states)
        rows = [[0] * n for _ in self.symbols]
        for src, sym, dst in self.transitions:
            rows[self.symbol_index[sym]][self.state_index[dst]] |= 1 << self.state_index[src]
        return rows

    @cached_property
    def source_masks(self):
        """Per symbol: states with an outgoing transition on it."""
        return [
            sum(1 << i for i, succ in enumerate(row) if succ) for row in self.succ_rows
        ]

    @cached_property
    def target_masks(self):
        """Per symbol: states with an incoming transition on it."""
        out = []
        for row in self.succ_rows:
            acc = 0
            for succ in row:
                acc |= succ
            out.append(acc)
        return out

    @cached_property
    def tables(self):
        return KernelTables(len(self.states), self.succ_rows, self.source_masks)

    def kernel_tables(self, backend=None):
        """Tables on a specific backend (``"cython"`` or ``"python"``)."""
        if backend is None:
            return self.tables
        return KernelTables(len(self.states), self.succ_rows, self.source_masks, backend)

    def is_non_blocking(self):
        """True when every state has at least one outgoing transition."""
        out = 0
        for m in self.source_masks:
            out |= m
        return out == self.full_mask

    def __repr__(self):
        return (
            f"Machine(states={len(self.states)}, symbols={len(self.symbols)}, "
            f"transitions={len(self.transitions)})"
        )


def enabled_states(m: Machine, symbol) -> StateSet:
    """States with an outgoing transition labelled ``symbol``."""
    return m.wrap(m.source_masks[m.symbol_id(symbol)])


def successors(m: Machine, symbols: Iterable[str], xi) -> StateSet:
    """Union of successors of ``xi`` under every symbol in ``symbols``."""
    if isinstance(symbols, str):
        symbols = [symbols]
    ids = m.symbol_ids(symbols)
    mask = m._own(xi) if isinstance(xi, StateSet) else m.mask_of(xi)
    return m.wrap(m.tables.image_many(ids, mask))


def enumerate_paths(m: Machine, w: Trace | Sequence[str]) -> set:
    """All ``(start, end)`` state pairs joined by a run reading ``w``.

    Works on the raw transition triples (no bitmask tables) so it can serve
    as an independent oracle.  The empty trace yields the diagonal.
    """
    symbols = w.symbols if isinstance(w, Trace) else tuple(w)
    for s in symbols:
        m.symbol_id(s)
    by_source = defaultdict(list)
    for src, sym, dst in m.transitions:
        by_source[src, sym].append(dst)
    pairs = {(x, x) for x in m.states}
    for s in symbols:
        pairs = {(a, c) for a, b in pairs for c in by_source.get((b, s), ())}
        if not pairs:
            break
    return pairs
