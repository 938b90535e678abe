"""Grid abstraction of a sampled flow.

Each grid cell becomes a state whose only symbol is its own label.  From
the cell center and its (slightly inset) corners the flow is integrated
for one sampling period; the cell gets a transition to every cell reached
and a self-loop if any sample stays put.  Samples that leave the box go to
a ``sink`` state.  This is a demonstration generator: a handful of samples
says nothing certain about the flow of the whole cell.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

from ..core import Machine
from ..errors import AbstractionError, EvaluationError, InputError
from .expr import VectorField, parse_field

log = logging.getLogger(__name__)

RK4_STEPS = 32
SINK = "sink"
SINK_LABEL = "out"
# corners are moved this fraction of a cell width inward so that a point on
# a shared face is never attributed to the neighbouring cell
CORNER_INSET = 1e-9


def integrate(f: VectorField, point, ts: float, steps: int = RK4_STEPS):
    """Classical fixed-step Runge-Kutta approximation of the time-``ts`` flow."""
    if isinstance(f, str):
        f = parse_field(f)
    x = tuple(float(v) for v in point)
    h = ts / steps
    for _ in range(steps):
        k1 = f(x)
        k2 = f(tuple(a + 0.5 * h * b for a, b in zip(x, k1)))
        k3 = f(tuple(a + 0.5 * h * b for a, b in zip(x, k2)))
        k4 = f(tuple(a + h * b for a, b in zip(x, k3)))
        x = tuple(a + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4))
    if not all(math.isfinite(v) for v in x):
        raise EvaluationError("trajectory diverged")
    return x


@dataclass(frozen=True)
class GridSpec:
    box: tuple  # ((lo, hi), ...) per dimension
    cells: tuple  # cells per dimension
    ts: float

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        cells = tuple(self.cells)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "cells", cells)
        if not 1 <= len(box) <= 2 or len(cells) != len(box):
            raise InputError("grid needs one (lo, hi) pair and one cell count per dimension, 1 or 2 dimensions")
        for lo, hi in box:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InputError(f"box bounds must satisfy lo < hi, got ({lo}, {hi})")
        for n in cells:
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                raise InputError(f"cell counts must be positive integers, got {n!r}")
        if not (math.isfinite(self.ts) and self.ts > 0):
            raise InputError("sampling time must be positive")

    @property
    def dimension(self):
        return len(self.box)

    def indices(self):
        return list(itertools.product(*(range(n) for n in self.cells)))

    def label(self, index) -> str:
        return "c" + "_".join(str(i) for i in index)

    def width(self, d):
        lo, hi = self.box[d]
        return (hi - lo) / self.cells[d]

    def locate(self, point):
        """Cell index of ``point`` or ``None`` outside the box."""
        index = []
        for d, v in enumerate(point):
            lo, hi = self.box[d]
            if not lo <= v <= hi:
                return None
            index.append(min(int((v - lo) / self.width(d)), self.cells[d] - 1))
        return tuple(index)

    def samples(self, index):
        lows = [self.box[d][0] + index[d] * self.width(d) for d in range(self.dimension)]
        center = tuple(lo + 0.5 * self.width(d) for d, lo in enumerate(lows))
        corners = []
        for offs in itertools.product((0, 1), repeat=self.dimension):
            corners.append(tuple(
                lo + self.width(d) * (CORNER_INSET if o == 0 else 1 - CORNER_INSET)
                for d, (lo, o) in enumerate(zip(lows, offs))
            ))
        return [center] + corners


def abstract_grid_counted(f, g: GridSpec):
    """Like :func:`abstract_grid` but also returns the number of skipped samples."""
    if isinstance(f, str):
        f = parse_field(f)
    if f.dimension != g.dimension:
        raise InputError(f"field has dimension {f.dimension} but the grid has {g.dimension}")
    indices = g.indices()
    order = {idx: i for i, idx in enumerate(indices)}
    transitions = []
    skipped = 0
    sink_used = False
    for idx in indices:
        reached = set()
        ok = 0
        for point in g.samples(idx):
            try:
                end = integrate(f, point, g.ts)
            except EvaluationError:
                skipped += 1
                continue
            ok += 1
            reached.add(g.locate(end))
        if ok == 0:
            raise AbstractionError(f"every sample of cell {g.label(idx)} failed to evaluate")
        src = g.label(idx)
        for dst in sorted((r for r in reached if r is not None), key=order.get):
            transitions.append((src, src, g.label(dst)))
        if None in reached:
            transitions.append((src, src, SINK))
            sink_used = True
    states = [g.label(idx) for idx in indices]
    symbols = list(states)
    if sink_used:
        states.append(SINK)
        symbols.append(SINK_LABEL)
        transitions.append((SINK, SINK_LABEL, SINK))
    if skipped:
        log.warning("skipped %d sample(s) whose trajectory could not be evaluated", skipped)
    return Machine(states, symbols, transitions), skipped


def abstract_grid(f, g: GridSpec) -> Machine:
    """Machine over grid cells; every transition is labelled with its source cell."""
    return abstract_grid_counted(f, g)[0]
