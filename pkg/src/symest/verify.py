"""Seeded random machines and executable property suites.

Every suite draws ``trials`` machines from a :class:`GenConfig`, checks one
property on sampled (and, for the exactness suites, exhaustively
enumerated) traces, and returns a :class:`Report`.  Failures are data:
each carries the trial seed, the machine, the decomposition if any and a
trace shrunk by dropping leading and trailing symbols while it still
fails, so ``random_machine(config.with_seed(failure.seed))`` replays it.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field, replace
from typing import Callable

from .chains import build_decomposition, check_chain_decomposable, is_chain, partition_chains
from .core import Machine, Trace
from .decomposition import AggregationMap, Decomposition
from .distributed import decentralized_estimate_and_predict, derive_distributed, exhaustive_agreement
from .errors import GenerationError, InputError, NotChainDecomposable
from .estimator import estimate, oracle_estimate, oracle_predict, predict
from .io import decomposition_to_dict, machine_to_dict
from .quotient import quotient_pipeline

log = logging.getLogger(__name__)

MAX_DRAWS = 50


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    min_states: int = 2
    max_states: int = 8
    min_symbols: int = 2
    max_symbols: int = 6
    density: float | tuple = 0.3
    chain_decomposable: bool = False
    non_injective: bool = False
    non_blocking: bool = False
    max_trace_len: int = 5
    traces: int = 20

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        if self.min_states < 1 or self.max_states < self.min_states:
            raise InputError("state count bounds must satisfy 1 <= min <= max")
        if self.max_states > 64:
            raise InputError("at most 64 states are supported by the generator")
        if self.min_symbols < 1 or self.max_symbols < self.min_symbols:
            raise InputError("symbol count bounds must satisfy 1 <= min <= max")
        lo, hi = self.density_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise InputError("density must lie in [0, 1]")
        if self.max_trace_len < 1 or self.traces < 1:
            raise InputError("max_trace_len and traces must be positive")
        if self.chain_decomposable and self.non_injective:
            raise GenerationError("chain_decomposable and non_injective are mutually exclusive")

    @property
    def density_range(self):
        if isinstance(self.density, (tuple, list)):
            return float(self.density[0]), float(self.density[1])
        return float(self.density), float(self.density)

    def with_seed(self, seed):
        return replace(self, seed=seed)


# -- generators -------------------------------------------------------------


def _draw_machine(c: GenConfig, rng: random.Random):
    n = rng.randint(c.min_states, c.max_states)
    if c.non_injective and n < 2:
        if c.max_states < 2:
            raise GenerationError("a non-injective machine needs at least 2 states")
        n = 2
    k = rng.randint(c.min_symbols, c.max_symbols)
    lo, hi = c.density_range
    density = rng.uniform(lo, hi)
    states = [f"x{i}" for i in range(1, n + 1)]
    symbols = [f"w{j}" for j in range(1, k + 1)]
    edges = {w: {} for w in symbols}  # symbol -> target -> [sources]
    for x in states:
        for w in symbols:
            for y in states:
                if rng.random() < density:
                    edges[w].setdefault(y, []).append(x)

    if c.chain_decomposable:
        for w in symbols:
            by_target = edges[w]
            extra = []
            for y in list(by_target):
                srcs = by_target[y]
                if len(srcs) > 1:
                    keep = rng.choice(srcs)
                    extra.extend(s for s in srcs if s != keep)
                    by_target[y] = [keep]
            for s in extra:
                free = [y for y in states if y not in by_target]
                if free:
                    by_target[rng.choice(free)] = [s]

    if c.non_blocking:
        for x in states:
            if any(x in srcs for w in symbols for srcs in edges[w].values()):
                continue
            options = []
            for w in symbols:
                targets = [y for y in states if y not in edges[w]] if c.chain_decomposable else states
                options.extend((w, y) for y in targets)
            if not options:
                return None
            w, y = rng.choice(options)
            edges[w].setdefault(y, []).append(x)

    if c.non_injective and not any(len(s) > 1 for w in symbols for s in edges[w].values()):
        w = rng.choice(symbols)
        y = rng.choice(states)
        s1, s2 = rng.sample(states, 2)
        srcs = edges[w].setdefault(y, [])
        for s in (s1, s2):
            if s not in srcs:
                srcs.append(s)

    order_x = {x: i for i, x in enumerate(states)}
    transitions = sorted(
        ((s, w, y) for w in symbols for y, srcs in edges[w].items() for s in srcs),
        key=lambda tr: (order_x[tr[0]], symbols.index(tr[1]), order_x[tr[2]]),
    )
    m = Machine(states, symbols, transitions)
    if c.chain_decomposable and check_chain_decomposable(m) is not None:
        return None
    if c.non_injective and check_chain_decomposable(m) is None:
        return None
    if c.non_blocking and not m.is_non_blocking():
        return None
    return m


def random_machine(c: GenConfig) -> Machine:
    """Machine drawn deterministically from ``c.seed``."""
    rng = random.Random(c.seed)
    for _ in range(MAX_DRAWS):
        m = _draw_machine(c, rng)
        if m is not None:
            return m
    raise GenerationError(f"no machine satisfying {c} after {MAX_DRAWS} draws")


def random_decomposition(symbols, rng: random.Random, p: int | None = None) -> Decomposition:
    """Coarse random maps plus one map that splits whatever the others left merged."""
    symbols = list(symbols)
    if p is None:
        p = rng.choice((2, 3))
    maps = []
    for k in range(1, p):
        n_labels = rng.randint(1, max(1, len(symbols) - 1))
        maps.append({w: f"k{k}:{rng.randrange(n_labels)}" for w in symbols})
    groups = {}
    for w in symbols:
        groups.setdefault(tuple(mp[w] for mp in maps), []).append(w)
    last = {}
    for members in groups.values():
        rng.shuffle(members)
        for i, w in enumerate(members):
            last[w] = f"k{p}:{i}"
    maps.append({w: last[w] for w in symbols})
    return Decomposition(AggregationMap(mp, k, symbols) for k, mp in enumerate(maps, start=1))


def sample_accepted(m: Machine, rng: random.Random, length: int, tau: int = 0, tries: int = 50):
    """Random walk of ``length`` symbols, or ``None`` if every walk blocked."""
    out = {x: [] for x in m.states}
    for src, sym, dst in m.transitions:
        out[src].append((sym, dst))
    starts = list(m.initial) if tau == 0 else list(m.states)
    if not starts:
        return None
    for _ in range(tries):
        x = rng.choice(starts)
        symbols = []
        for _ in range(length):
            if not out[x]:
                break
            sym, x = rng.choice(out[x])
            symbols.append(sym)
        else:
            return Trace(symbols, tau)
    return None


def sample_rejected(m: Machine, rng: random.Random, length: int, tries: int = 200):
    for _ in range(tries):
        w = Trace([rng.choice(m.symbols) for _ in range(length)])
        if not estimate(m, w):
            return w
    return None


def _sample_traces(m, c: GenConfig, rng, quota=True):
    accepted = []
    for _ in range(c.traces):
        w = sample_accepted(m, rng, rng.randint(1, c.max_trace_len))
        if w is not None:
            accepted.append(w)
    rejected = []
    if quota:
        for _ in range(c.traces // 10):
            w = sample_rejected(m, rng, c.max_trace_len)
            if w is not None:
                rejected.append(w)
    return accepted, rejected


# -- reports ----------------------------------------------------------------


@dataclass
class Failure:
    seed: int
    machine: Machine
    trace: Trace
    expected: dict
    got: dict
    decomposition: Decomposition | None = None
    detail: str = ""

    def to_dict(self):
        return {
            "seed": self.seed,
            "detail": self.detail,
            "trace": {"tau": self.trace.tau, "symbols": list(self.trace.symbols)},
            "expected": self.expected,
            "got": self.got,
            "machine": machine_to_dict(self.machine),
            "decomposition": decomposition_to_dict(self.decomposition) if self.decomposition else None,
        }


@dataclass
class Report:
    name: str
    trials: int = 0
    instances: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.failures

    def summary(self):
        extra = "".join(f" {k}={v}" for k, v in sorted(self.stats.items()))
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: trials={self.trials} instances={self.instances} failures={len(self.failures)}{extra}"

    def render(self):
        lines = [self.summary()]
        for f in self.failures:
            lines.append("  witness: " + json.dumps(f.to_dict(), sort_keys=True))
        return "\n".join(lines)


def shrink_trace(w: Trace, fails: Callable[[Trace], bool]) -> Trace:
    """Drop leading/trailing symbols while ``fails`` stays true."""
    changed = True
    while changed and len(w) > 1:
        changed = False
        head = Trace(w.symbols[1:], w.tau + 1)
        if fails(head):
            w, changed = head, True
            continue
        tail = Trace(w.symbols[:-1], w.tau)
        if fails(tail):
            w, changed = tail, True
    return w


def _trial_seeds(c: GenConfig, trials: int):
    if not isinstance(trials, int) or trials < 1:
        raise InputError("trials must be a positive integer")
    rng = random.Random(c.seed)
    return [rng.getrandbits(64) for _ in range(trials)]


def _names(s):
    return s.names()


# -- suites -----------------------------------------------------------------


def verify_oracle(c: GenConfig, trials: int, estimate_fn=None, predict_fn=None) -> Report:
    """Recursive estimator vs. explicit path enumeration.

    Each machine gets ``c.traces`` accepted traces, the same traces with a
    random prefix cut off (window start > 0), and ``c.traces // 10``
    rejected traces.  Machines on which either quota cannot be met are
    redrawn.
    """
    est = estimate_fn or estimate
    pred = predict_fn or predict
    report = Report("oracle")
    rejected_total = redrawn = 0
    for seed in _trial_seeds(c, trials):
        report.trials += 1
        rng = random.Random(seed)
        for _ in range(MAX_DRAWS):
            m = random_machine(c.with_seed(seed))
            accepted, rejected = _sample_traces(m, c, rng)
            if len(accepted) == c.traces and len(rejected) >= c.traces // 10:
                break
            redrawn += 1
            seed = rng.getrandbits(64)
        rejected_total += len(rejected)
        windows = []
        for w in accepted:
            if len(w) > 1:
                windows.append(w.window(rng.randint(1, len(w) - 1)))
        report.stats["accepted"] = report.stats.get("accepted", 0) + len(accepted)

        def fails(w, m=m):
            return est(m, w) != oracle_estimate(m, w) or pred(m, w) != oracle_predict(m, w)

        for w in accepted + windows + rejected:
            report.instances += 1
            if fails(w):
                w = shrink_trace(w, fails)
                report.failures.append(
                    Failure(
                        seed, m, w,
                        {"chi": _names(oracle_estimate(m, w)), "rho": _names(oracle_predict(m, w))},
                        {"chi": _names(est(m, w)), "rho": _names(pred(m, w))},
                        detail="recursive estimate differs from path enumeration",
                    )
                )
                break
    report.stats["rejected"] = rejected_total
    report.stats["redrawn"] = redrawn
    return report


def verify_monotonicity(c: GenConfig, trials: int) -> Report:
    """Later window starts never shrink the estimate or the prediction."""
    report = Report("monotone")
    for seed in _trial_seeds(c, trials):
        report.trials += 1
        rng = random.Random(seed)
        m = random_machine(c.with_seed(seed))
        accepted, _ = _sample_traces(m, c, rng, quota=False)
        for w in accepted:
            sets = [(estimate(m, w.window(s)), predict(m, w.window(s))) for s in range(w.tau, w.t + 1)]
            bad = None
            for i in range(len(sets)):
                for j in range(i, len(sets)):
                    report.instances += 1
                    if bad is None and not (sets[i][0] <= sets[j][0] and sets[i][1] <= sets[j][1]):
                        bad = (i, j)
            if bad is not None:
                i, j = bad
                report.failures.append(
                    Failure(
                        seed, m, w,
                        {"chi": f"window {w.tau + i} within window {w.tau + j}"},
                        {"chi_early": _names(sets[i][0]), "chi_late": _names(sets[j][0]),
                         "rho_early": _names(sets[i][1]), "rho_late": _names(sets[j][1])},
                        detail=f"inclusion fails between window starts {w.tau + i} and {w.tau + j}",
                    )
                )
                break
    return report


def verify_overapprox(c: GenConfig, trials: int) -> Report:
    """Decentralized results contain the monolithic ones for random decompositions."""
    report = Report("overapprox")
    strict = 0
    for seed in _trial_seeds(c, trials):
        report.trials += 1
        rng = random.Random(seed)
        m = random_machine(c.with_seed(seed))
        d = random_decomposition(m.symbols, rng)
        f = derive_distributed(m, d)
        accepted, rejected = _sample_traces(m, c, rng)

        def fails(w, m=m, f=f):
            dc, dr = decentralized_estimate_and_predict(f, w)
            return not (estimate(m, w) <= dc and predict(m, w) <= dr)

        for w in accepted + rejected:
            report.instances += 1
            dc, dr = decentralized_estimate_and_predict(f, w)
            mc, mr = estimate(m, w), predict(m, w)
            if mc < dc or mr < dr:
                strict += 1
            if fails(w):
                w = shrink_trace(w, fails)
                dc, dr = decentralized_estimate_and_predict(f, w)
                report.failures.append(
                    Failure(
                        seed, m, w,
                        {"chi": _names(estimate(m, w)), "rho": _names(predict(m, w))},
                        {"chi": _names(dc), "rho": _names(dr)},
                        d, "decentralized result misses a monolithic state",
                    )
                )
                break
    report.stats["strict"] = strict
    return report


def _exactness_checks(report, seed, m, d, c, rng, label):
    """Exhaustive kernel walk plus sampled checks through the public API."""
    f = derive_distributed(m, d)

    def fails(w):
        return decentralized_estimate_and_predict(f, w) != (estimate(m, w), predict(m, w))

    checks, bad = exhaustive_agreement(f, c.max_trace_len)
    report.instances += checks
    if bad is None:
        accepted, rejected = _sample_traces(m, c, rng)
        for w in accepted + rejected:
            report.instances += 1
            if fails(w):
                bad = w
                break
    if bad is not None:
        bad = shrink_trace(bad, fails)
        dc, dr = decentralized_estimate_and_predict(f, bad)
        report.failures.append(
            Failure(
                seed, m, bad,
                {"chi": _names(estimate(m, bad)), "rho": _names(predict(m, bad))},
                {"chi": _names(dc), "rho": _names(dr)},
                d, f"{label}: decentralized result differs from monolithic",
            )
        )
        return False
    return True


def verify_chain_exactness(c: GenConfig, trials: int, ps=(1, 2, 3)) -> Report:
    """Chain-partition decompositions are exact on chain-decomposable machines."""
    c = replace(c, chain_decomposable=True, non_injective=False)
    report = Report("t1")
    blocks = 0
    for seed in _trial_seeds(c, trials):
        report.trials += 1
        rng = random.Random(seed)
        m = random_machine(c.with_seed(seed))
        cp = partition_chains(m)
        blocks += cp.r
        for block in cp.blocks:
            violations = is_chain(m, block)
            if violations:
                report.failures.append(
                    Failure(seed, m, Trace(()), {"chain": list(block)}, {"violations": [v.message for v in violations]},
                            detail="partition block is not a chain")
                )
        for p in ps:
            if not _exactness_checks(report, seed, m, build_decomposition(m, cp, p), c, rng, f"p={p}"):
                break
    report.stats["blocks"] = blocks
    return report


def verify_quotient_exactness(c: GenConfig, trials: int, ps=(1, 2, 3)) -> Report:
    """Quotient-derived decompositions are exact on machines that are not chain-decomposable."""
    c = replace(c, chain_decomposable=False, non_injective=True)
    report = Report("t2")
    extra_iterations = 0
    for seed in _trial_seeds(c, trials):
        report.trials += 1
        rng = random.Random(seed)
        m = random_machine(c.with_seed(seed))
        for p in ps:
            try:
                result = quotient_pipeline(m, p)
            except NotChainDecomposable as exc:
                report.failures.append(
                    Failure(seed, m, Trace(()), {"quotient": "chain-decomposable"}, {"witness": str(exc.witness)},
                            detail="quotient pipeline did not reach a chain-decomposable quotient")
                )
                break
            if check_chain_decomposable(result.quotient.machine) is not None:
                report.failures.append(
                    Failure(seed, m, Trace(()), {"quotient": "chain-decomposable"}, {"quotient": "not"},
                            detail="intermediate quotient is not chain-decomposable")
                )
                break
            if result.iterations > 1:
                extra_iterations += 1
                log.warning("seed %d: quotient needed %d iterations", seed, result.iterations)
            if not _exactness_checks(report, seed, m, result.decomposition, c, rng, f"p={p}"):
                break
    report.stats["multi_iteration"] = extra_iterations
    return report


SUITES = {
    "oracle": verify_oracle,
    "monotone": verify_monotonicity,
    "overapprox": verify_overapprox,
    "t1": verify_chain_exactness,
    "t2": verify_quotient_exactness,
}

# desk-scale defaults per suite; the seed is filled in by the caller
DEFAULT_CONFIGS = {
    "oracle": GenConfig(min_states=1, max_states=12, min_symbols=1, max_symbols=10,
                        density=(0.1, 0.5), max_trace_len=5, traces=50),
    "monotone": GenConfig(min_states=1, max_states=12, min_symbols=1, max_symbols=10,
                          density=(0.1, 0.5), max_trace_len=6, traces=20),
    "overapprox": GenConfig(min_states=2, max_states=10, min_symbols=2, max_symbols=8,
                            density=(0.1, 0.5), max_trace_len=5, traces=10),
    "t1": GenConfig(min_states=2, max_states=12, min_symbols=2, max_symbols=10,
                    density=(0.1, 0.5), max_trace_len=6, traces=10),
    "t2": GenConfig(min_states=2, max_states=10, min_symbols=2, max_symbols=8,
                    density=(0.1, 0.5), max_trace_len=5, traces=10),
}


def run_suite(name: str, seed: int, trials: int) -> Report:
    config = DEFAULT_CONFIGS[name].with_seed(seed)
    return SUITES[name](config, trials)
