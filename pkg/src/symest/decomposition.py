"""Aggregation maps and signal-space decompositions.

An :class:`AggregationMap` sends every symbol of ``W`` to a label; its
fibres are the classes of an equivalence relation on ``W``.  A
:class:`Decomposition` is a list of such maps whose label tuples jointly
identify every symbol.  Maps lift elementwise to traces, and preimages of
label traces are kept in product form (one symbol set per position)
because their materialized size grows exponentially with length.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Sequence

from .core import Trace
from .errors import InconsistentDecomposition, InputError, PreimageOverflow

DEFAULT_MATERIALIZE_CAP = 10**6


class AggregationMap:
    """Total labelling ``W -> V_k`` of the symbol alphabet."""

    def __init__(self, mapping: Mapping[str, str], index: int = 1, symbols: Sequence[str] | None = None):
        if symbols is None:
            symbols = tuple(mapping)
        else:
            symbols = tuple(symbols)
            missing = [w for w in symbols if w not in mapping]
            if missing:
                raise InputError(f"aggregation map {index} is not total: no label for {missing[0]!r}")
            extra = [w for w in mapping if w not in set(symbols)]
            if extra:
                raise InputError(f"aggregation map {index} labels unknown symbol {extra[0]!r}")
        if not symbols:
            raise InputError("aggregation map over an empty alphabet")
        self.index = index
        self.symbols = symbols
        self.forward = {w: mapping[w] for w in symbols}
        for w, label in self.forward.items():
            if not isinstance(label, str):
                raise InputError(f"label for {w!r} must be a string, got {label!r}")
        labels = []
        fibres = {}
        for w in symbols:
            label = self.forward[w]
            if label not in fibres:
                fibres[label] = []
                labels.append(label)
            fibres[label].append(w)
        self.labels = tuple(labels)
        self.fibres = {label: tuple(ws) for label, ws in fibres.items()}

    @classmethod
    def identity(cls, symbols: Sequence[str], index: int = 1):
        return cls({w: w for w in symbols}, index)

    @classmethod
    def constant(cls, symbols: Sequence[str], label: str = "*", index: int = 1):
        return cls({w: label for w in symbols}, index)

    def __call__(self, symbol):
        try:
            return self.forward[symbol]
        except (KeyError, TypeError):
            raise InputError(f"unknown symbol {symbol!r}") from None

    def preimage(self, label) -> tuple:
        try:
            return self.fibres[label]
        except (KeyError, TypeError):
            raise InputError(f"unknown label {label!r} for aggregation map {self.index}") from None

    def classes(self):
        """Equivalence classes of ``W`` in label order."""
        return [self.fibres[label] for label in self.labels]

    def __eq__(self, other):
        if not isinstance(other, AggregationMap):
            return NotImplemented
        return self.index == other.index and self.forward == other.forward and self.symbols == other.symbols

    def __hash__(self):
        return hash((self.index, tuple(self.forward.items())))

    def __repr__(self):
        return f"AggregationMap(index={self.index}, labels={len(self.labels)})"


def check_consistency(maps) -> tuple | None:
    """Return ``None`` when the maps separate all symbols, else a colliding pair."""
    maps = list(maps.maps if isinstance(maps, Decomposition) else maps)
    if not maps:
        raise InputError("decomposition needs at least one map")
    alphabet = set(maps[0].symbols)
    for a in maps[1:]:
        if set(a.symbols) != alphabet:
            raise InputError(f"aggregation maps {maps[0].index} and {a.index} have different alphabets")
    seen = {}
    for w in maps[0].symbols:
        key = tuple(a.forward[w] for a in maps)
        if key in seen:
            return seen[key], w
        seen[key] = w
    return None


class Decomposition:
    """Ordered list of ``p`` consistent aggregation maps over one alphabet."""

    def __init__(self, maps: Iterable[AggregationMap]):
        maps = tuple(maps)
        witness = check_consistency(maps)
        if witness is not None:
            raise InconsistentDecomposition(witness)
        self.maps = maps
        self.symbols = maps[0].symbols

    @classmethod
    def from_mappings(cls, mappings: Sequence[Mapping[str, str]], symbols=None):
        return cls(AggregationMap(mp, k, symbols) for k, mp in enumerate(mappings, start=1))

    @classmethod
    def identity(cls, symbols):
        return cls([AggregationMap.identity(symbols)])

    @property
    def p(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __getitem__(self, k):
        return self.maps[k]

    def label_tuple(self, symbol):
        return tuple(a(symbol) for a in self.maps)

    def mappings(self):
        return [dict(a.forward) for a in self.maps]

    def __eq__(self, other):
        if not isinstance(other, Decomposition):
            return NotImplemented
        return self.maps == other.maps

    def __hash__(self):
        return hash(self.maps)

    def __repr__(self):
        return f"Decomposition(p={self.p}, symbols={len(self.symbols)})"


class ProductTraceSet:
    """Set of equal-length traces given as a product of per-position symbol sets."""

    def __init__(self, positions: Sequence[Sequence[str]], tau: int = 0):
        self.positions = tuple(tuple(p) for p in positions)
        self.tau = tau

    def size(self):
        n = 1
        for p in self.positions:
            n *= len(p)
        return n

    def __len__(self):
        return self.size()

    def __contains__(self, w):
        symbols = w.symbols if isinstance(w, Trace) else tuple(w)
        return len(symbols) == len(self.positions) and all(
            s in p for s, p in zip(symbols, self.positions)
        )

    def __iter__(self):
        return (tuple(t) for t in product(*self.positions))

    def materialize(self, cap: int = DEFAULT_MATERIALIZE_CAP) -> set:
        if self.size() > cap:
            raise PreimageOverflow(f"product trace set has {self.size()} elements, cap is {cap}")
        return set(self)

    def as_sets(self):
        return [set(p) for p in self.positions]

    def __eq__(self, other):
        if not isinstance(other, ProductTraceSet):
            return NotImplemented
        return self.tau == other.tau and self.as_sets() == other.as_sets()

    def __repr__(self):
        return f"ProductTraceSet({[list(p) for p in self.positions]!r}, tau={self.tau})"


class TraceUnion:
    """Finite union of :class:`ProductTraceSet` parts."""

    def __init__(self, parts: Iterable[ProductTraceSet]):
        self.parts = tuple(parts)

    def __contains__(self, w):
        return any(w in part for part in self.parts)

    def materialize(self, cap: int = DEFAULT_MATERIALIZE_CAP) -> set:
        total = sum(part.size() for part in self.parts)
        if total > cap:
            raise PreimageOverflow(f"trace union has up to {total} elements, cap is {cap}")
        out = set()
        for part in self.parts:
            out.update(part)
        return out


def aggregate_trace(a: AggregationMap, w) -> Trace:
    trace = w if isinstance(w, Trace) else Trace(w)
    return Trace(tuple(a(s) for s in trace.symbols), trace.tau)


def preimage_trace(a: AggregationMap, v) -> ProductTraceSet:
    """All traces over ``W`` whose image under ``a`` is ``v``."""
    trace = v if isinstance(v, Trace) else Trace(v)
    return ProductTraceSet([a.preimage(label) for label in trace.symbols], trace.tau)


def restriction_domain(d: Decomposition, w) -> TraceUnion:
    """Union over the maps of the preimage of the aggregated trace."""
    trace = w if isinstance(w, Trace) else Trace(w)
    return TraceUnion(preimage_trace(a, aggregate_trace(a, trace)) for a in d.maps)
