"""Backend selection for the state-set kernels.

The compiled backend is used when the extension imports and the machine
has at most 64 states; everything else runs on the pure-Python backend.
Set ``SYMEST_PURE_PYTHON=1`` to disable the extension at import time.
"""

import os
from array import array

from . import _pykernel

_native = None
if not os.environ.get("SYMEST_PURE_PYTHON"):
    try:
        from . import _ckernel as _native
    except ImportError:  # extension not built
        _native = None

NATIVE_AVAILABLE = _native is not None
NATIVE_MAX_STATES = 64


def backend_name():
    return "cython" if NATIVE_AVAILABLE else "python"


class KernelTables:
    """Successor and source tables for one machine, bound to a backend."""

    __slots__ = ("n", "n_symbols", "impl", "succ", "chi")

    def __init__(self, n, succ_rows, chi_masks, backend=None):
        # succ_rows[sym][state] -> successor bitmask
        self.n = n
        self.n_symbols = len(chi_masks)
        flat = [mask for row in succ_rows for mask in row]
        if backend is None:
            backend = "cython" if NATIVE_AVAILABLE and n <= NATIVE_MAX_STATES else "python"
        if backend == "cython":
            if not NATIVE_AVAILABLE:
                raise RuntimeError("compiled kernel is not available")
            if n > NATIVE_MAX_STATES:
                raise ValueError(f"compiled kernel supports at most {NATIVE_MAX_STATES} states")
            self.impl = _native
            self.succ = array("Q", flat)
            self.chi = array("Q", chi_masks)
        elif backend == "python":
            self.impl = _pykernel
            self.succ = flat
            self.chi = list(chi_masks)
        else:
            raise ValueError(f"unknown backend {backend!r}")

    @property
    def backend(self):
        return "cython" if self.impl is _native else "python"

    def image(self, sym, mask):
        return self.impl.image(self.succ, self.n, sym, mask)

    def image_many(self, syms, mask):
        return self.impl.image_many(self.succ, self.n, syms, mask)

    def step(self, sym, prior):
        return self.impl.step(self.succ, self.chi, self.n, sym, prior)

    def run(self, syms, prior):
        return self.impl.run(self.succ, self.chi, self.n, syms, prior)

    def run_steps(self, syms, prior):
        return self.impl.run_steps(self.succ, self.chi, self.n, syms, prior)


def compare_exhaustive(base: KernelTables, parts, symmap, max_len, prior):
    """Compare ``base`` against the intersection of ``parts`` on every accepted
    string up to ``max_len``.

    ``symmap[k][s]`` is the symbol index in ``parts[k]`` of base symbol ``s``.
    Returns ``(checks, None)`` or ``(checks, symbol_ids)`` of the first
    disagreement.
    """
    if max_len < 1:
        return 0, None
    backend = base.backend
    if any(t.backend != backend or t.n != base.n for t in parts):
        raise ValueError("all tables must share the backend and state count")
    ksucc, kchi, soff, coff = [], [], [], []
    for t in parts:
        soff.append(len(ksucc))
        coff.append(len(kchi))
        ksucc.extend(t.succ)
        kchi.extend(t.chi)
    flat_map = [s for row in symmap for s in row]
    if backend == "cython":
        ksucc, kchi = array("Q", ksucc), array("Q", kchi)
        soff, coff, flat_map = array("q", soff), array("q", coff), array("q", flat_map)
    return base.impl.compare_exhaustive(
        base.succ, base.chi, base.n, base.n_symbols, ksucc, kchi, soff, coff, flat_map,
        len(parts), max_len, prior,
    )
