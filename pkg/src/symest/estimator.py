"""Set-valued estimation and prediction over finite observation windows.

For a window ``w(tau) ... w(t)`` the estimate is the set of states the
machine can occupy at ``t`` and the prediction is the set it can occupy
at ``t + 1``.  Both are computed by the forward recursion

    chi_t = rho_{t-1} & sources(w(t)),    rho_t = succ_{w(t)}(chi_t)

seeded with the initial states when the window starts at time 0 and with
all states otherwise (a slid window has forgotten the initial condition).
An empty result means no run of the machine produces the window.
"""

from __future__ import annotations

from collections import deque

from .core import Machine, StateSet, Trace, enumerate_paths
from .errors import InputError


def as_trace(w) -> Trace:
    if isinstance(w, Trace):
        return w
    return Trace(w)


def prior_mask(m: Machine, tau: int) -> int:
    return m.initial_mask if tau == 0 else m.full_mask


def estimate_and_predict(m: Machine, w) -> tuple[StateSet, StateSet]:
    """``(chi, rho)`` for the window.  The empty window returns the prior twice."""
    trace = as_trace(w)
    ids = m.symbol_ids(trace.symbols)
    prior = prior_mask(m, trace.tau)
    if not ids:
        return m.wrap(prior), m.wrap(prior)
    c, r = m.tables.run(ids, prior)
    return m.wrap(c), m.wrap(r)


def estimate(m: Machine, w) -> StateSet:
    return estimate_and_predict(m, w)[0]


def predict(m: Machine, w) -> StateSet:
    return estimate_and_predict(m, w)[1]


def estimate_steps(m: Machine, w) -> list[tuple[StateSet, StateSet]]:
    """``(chi, rho)`` after every prefix of the window."""
    trace = as_trace(w)
    ids = m.symbol_ids(trace.symbols)
    chis, rhos = m.tables.run_steps(ids, prior_mask(m, trace.tau))
    return [(m.wrap(c), m.wrap(r)) for c, r in zip(chis, rhos)]


class OnlineEstimator:
    """Streaming estimator; feed one symbol at a time with :meth:`step`.

    With ``window=None`` the recursion runs over the whole history.  With a
    finite ``window`` the estimate after each step equals the batch
    estimate over the last ``window`` symbols; it is recomputed from the
    buffer since set intersection cannot be undone.
    """

    def __init__(self, machine: Machine, window: int | None = None, tau: int = 0):
        if window is not None and (not isinstance(window, int) or window < 1):
            raise InputError(f"window length must be a positive integer, got {window!r}")
        self.machine = machine
        self.window = window
        self.tau = tau
        self.t = tau - 1
        self._buffer = deque(maxlen=window) if window else None
        self._chi = prior_mask(machine, tau)
        self._rho = self._chi

    @property
    def chi(self) -> StateSet:
        return self.machine.wrap(self._chi)

    @property
    def rho(self) -> StateSet:
        return self.machine.wrap(self._rho)

    def window_start(self):
        if self.window is None:
            return self.tau
        return max(self.tau, self.t - self.window + 1)

    def step(self, symbol) -> "OnlineEstimator":
        m = self.machine
        sym = m.symbol_id(symbol)
        self.t += 1
        if self._buffer is None:
            self._chi, self._rho = m.tables.step(sym, self._rho)
        else:
            self._buffer.append(sym)
            start = self.window_start()
            self._chi, self._rho = m.tables.run(list(self._buffer), prior_mask(m, start))
        return self

    def feed(self, symbols):
        for s in symbols:
            self.step(s)
        return self


def _allowed_starts(m: Machine, tau: int):
    return set(m.initial) if tau == 0 else set(m.states)


def oracle_estimate(m: Machine, w) -> StateSet:
    """Estimate from explicit path enumeration, without the recursion."""
    trace = as_trace(w)
    if not trace.symbols:
        return m.wrap(prior_mask(m, trace.tau))
    allowed = _allowed_starts(m, trace.tau)
    head = enumerate_paths(m, trace.symbols[:-1])
    reached = {b for a, b in head if a in allowed}
    can_fire = {a for a, _ in enumerate_paths(m, trace.symbols[-1:])}
    return m.stateset(x for x in m.states if x in reached and x in can_fire)


def oracle_predict(m: Machine, w) -> StateSet:
    trace = as_trace(w)
    if not trace.symbols:
        return m.wrap(prior_mask(m, trace.tau))
    allowed = _allowed_starts(m, trace.tau)
    ends = {b for a, b in enumerate_paths(m, trace.symbols) if a in allowed}
    return m.stateset(x for x in m.states if x in ends)
