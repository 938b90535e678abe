"""``symest`` command line.

Exit codes: 0 ok, 1 parse error, 2 validation error, 3 rejected trace
(final estimate empty), 4 not chain-decomposable, 5 property failures
reported by ``verify``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import io
from .abstraction import GridSpec, abstract_grid_counted, parse_field
from .chains import IsMachineView, build_decomposition, iso_partition, partition_chains
from .core import Trace
from .distributed import decentralized_steps, derive_distributed
from .errors import (
    AbstractionError,
    EvaluationError,
    GenerationError,
    InputError,
    NotChainDecomposable,
    ParseError,
)
from .estimator import OnlineEstimator, estimate_steps
from .quotient import quotient_pipeline
from .verify import SUITES, GenConfig, random_machine, run_suite

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_REJECTED, EXIT_NOT_CHAIN, EXIT_FAILURES = 0, 1, 2, 3, 4, 5
SUITE_ORDER = ("oracle", "monotone", "overapprox", "t1", "t2")


class UsageError(InputError):
    pass


def _fmt(states) -> str:
    return "[" + ", ".join(states) + "]"


def _out(text: str):
    sys.stdout.write(text)


def _write_or_print(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        _out(text)


def _load_trace(path) -> Trace:
    w = io.load_trace(path)
    if len(w) == 0:
        raise UsageError(f"{path}: trace is empty")
    return w


def _describe_witness(witness) -> str:
    if isinstance(witness, tuple) and len(witness) == 3:
        sym, target, (s1, s2) = witness
        return f"symbol {sym!r} enters {target!r} from both {s1!r} and {s2!r}"
    if isinstance(witness, list):
        return "; ".join(v.message for v in witness)
    return str(witness)


# -- estimate -----------------------------------------------------------------


def cmd_estimate(args) -> int:
    m = io.load_machine(args.machine)
    w = _load_trace(args.trace)
    if args.window is not None and args.window < 1:
        raise UsageError("--window must be at least 1")
    est = OnlineEstimator(m, window=args.window, tau=w.tau)
    chi = None
    for i, sym in enumerate(w.symbols):
        est.step(sym)
        chi, rho = est.chi, est.rho
        t = w.tau + i
        if args.json:
            _out(json.dumps({"t": t, "symbol": sym, "chi": chi.names(), "rho": rho.names()}) + "\n")
        else:
            line = f"t={t} {sym}: chi={_fmt(chi.names())}"
            if args.predict:
                line += f" rho={_fmt(rho.names())}"
            _out(line + "\n")
    return EXIT_REJECTED if not chi else EXIT_OK


# -- decompose ----------------------------------------------------------------


def cmd_decompose(args) -> int:
    m = io.load_machine(args.machine)
    if args.p < 1:
        raise UsageError("--p must be at least 1")
    lines = [f"strategy: {args.strategy}", f"p: {args.p}"]
    try:
        if args.strategy == "chain":
            cp = partition_chains(m)
            d = build_decomposition(m, cp, args.p)
        elif args.strategy == "iso":
            inputs = args.inputs.split(",") if args.inputs else None
            outputs = args.outputs.split(",") if args.outputs else None
            view = IsMachineView.from_machine(m, sep=args.sep, inputs=inputs, outputs=outputs)
            cp = iso_partition(view)
            d = build_decomposition(m, cp, args.p)
        else:
            result = quotient_pipeline(m, args.p)
            cp, d = result.partition, result.decomposition
            lines.append(f"quotient iterations: {result.iterations}")
            lines.append("classes:")
            for label, members in result.quotient.qmap.classes:
                lines.append(f"  {label}: {' '.join(members)}")
    except NotChainDecomposable as exc:
        _out(f"not chain-decomposable: {_describe_witness(exc.witness)}\n")
        return EXIT_NOT_CHAIN
    lines.append("chains:")
    for j, block in enumerate(cp.blocks, start=1):
        lines.append(f"  {j}: {' '.join(block)}")
    if args.out:
        io.save_decomposition(d, args.out)
        lines.append(f"wrote {args.out}")
        _out("\n".join(lines) + "\n")
    else:
        _out("\n".join(lines) + "\n" + io.dumps_decomposition(d))
    return EXIT_OK


# -- distributed --------------------------------------------------------------


def cmd_distributed(args) -> int:
    m = io.load_machine(args.machine)
    d = io.load_decomposition(args.decomposition, m.symbols)
    w = _load_trace(args.trace)
    f = derive_distributed(m, d)
    mono = estimate_steps(m, w)
    dec = decentralized_steps(f, w)
    views = f.aggregate(w)
    for i, ((per_k, chi, rho), (mchi, mrho)) in enumerate(zip(dec, mono)):
        t = w.tau + i
        exact = chi == mchi and rho == mrho
        flag = "EXACT" if exact else "OVERAPPROX"
        if args.json:
            rec = {
                "t": t,
                "symbol": w.symbols[i],
                "distributed": [
                    {"k": k, "label": views[k - 1].symbols[i], "chi": c.names(), "rho": r.names()}
                    for k, (c, r) in enumerate(per_k, start=1)
                ],
                "chi": chi.names(),
                "rho": rho.names(),
                "monolithic_chi": mchi.names(),
                "monolithic_rho": mrho.names(),
                "flag": flag,
            }
            _out(json.dumps(rec) + "\n")
            continue
        _out(f"t={t} {w.symbols[i]}: {flag}\n")
        for k, (c, r) in enumerate(per_k, start=1):
            _out(f"  P{k} {views[k - 1].symbols[i]}: chi={_fmt(c.names())} rho={_fmt(r.names())}\n")
        _out(f"  intersection: chi={_fmt(chi.names())} rho={_fmt(rho.names())}\n")
        _out(f"  monolithic:   chi={_fmt(mchi.names())} rho={_fmt(mrho.names())}\n")
    return EXIT_REJECTED if not mono[-1][0] else EXIT_OK


# -- verify -------------------------------------------------------------------


def cmd_verify(args) -> int:
    seed = args.seed
    env = os.environ.get("SYMEST_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"SYMEST_SEED must be an integer, got {env!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    names = SUITE_ORDER if args.suite == "all" else (args.suite,)
    ok = True
    for name in names:
        report = run_suite(name, seed, args.trials)
        _out(report.render() + "\n")
        ok = ok and report.ok
    return EXIT_OK if ok else EXIT_FAILURES


# -- random -------------------------------------------------------------------


def cmd_random(args) -> int:
    c = GenConfig(
        seed=args.seed,
        min_states=args.states,
        max_states=args.states,
        min_symbols=args.symbols,
        max_symbols=args.symbols,
        density=args.density,
        chain_decomposable=args.chain_decomposable,
        non_injective=args.non_injective,
        non_blocking=args.non_blocking,
    )
    m = random_machine(c)
    _write_or_print(io.to_dot(m) if args.dot else io.dumps_machine(m), args.out)
    return EXIT_OK


# -- abstract -----------------------------------------------------------------


def cmd_abstract(args) -> int:
    f = parse_field(args.field)
    if len(args.box) != 2 * f.dimension:
        raise UsageError(f"--box needs {2 * f.dimension} numbers (lo hi per dimension)")
    box = [(args.box[2 * i], args.box[2 * i + 1]) for i in range(f.dimension)]
    cells = list(args.cells)
    if len(cells) == 1:
        cells = cells * f.dimension
    if len(cells) != f.dimension:
        raise UsageError(f"--cells needs 1 or {f.dimension} counts")
    m, skipped = abstract_grid_counted(f, GridSpec(box, cells, args.ts))
    if skipped:
        sys.stderr.write(f"warning: skipped {skipped} sample(s)\n")
    _write_or_print(io.to_dot(m) if args.dot else io.dumps_machine(m), args.out)
    return EXIT_OK


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symest", description="Set-valued state estimation for non-deterministic machines.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimated (and predicted) state sets per time step")
    p.add_argument("machine")
    p.add_argument("trace")
    p.add_argument("--window", type=int, help="only use the last L symbols")
    p.add_argument("--predict", action="store_true", help="also print the predicted set")
    p.add_argument("--json", action="store_true", help="one JSON record per step")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("decompose", help="build an exact decomposition")
    p.add_argument("machine")
    p.add_argument("--p", type=int, default=2, help="number of distributed machines")
    p.add_argument("--strategy", choices=("chain", "quotient", "iso"), default="chain")
    p.add_argument("--inputs", help="comma-separated input symbols (iso)")
    p.add_argument("--outputs", help="comma-separated output symbols (iso)")
    p.add_argument("--sep", default="/", help="input/output separator inside symbols (iso)")
    p.add_argument("--out", help="write the decomposition here")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("distributed", help="compare decentralized and monolithic estimates")
    p.add_argument("machine")
    p.add_argument("decomposition")
    p.add_argument("trace")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_distributed)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("--suite", choices=("all",) + tuple(SUITES), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("random", help="generate a seeded random machine")
    p.add_argument("--states", type=int, default=4)
    p.add_argument("--symbols", type=int, default=3)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chain-decomposable", action="store_true")
    p.add_argument("--non-injective", action="store_true")
    p.add_argument("--non-blocking", action="store_true")
    p.add_argument("--out")
    p.add_argument("--dot", action="store_true", help="emit Graphviz text instead of JSON")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("abstract", help="grid abstraction of a vector field")
    p.add_argument("--field", required=True, help='e.g. "x2 ; -x1"')
    p.add_argument("--box", type=float, nargs="+", required=True, help="lo hi [lo hi]")
    p.add_argument("--cells", type=int, nargs="+", required=True)
    p.add_argument("--ts", type=float, required=True, help="sampling time")
    p.add_argument("--out")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_abstract)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (InputError, GenerationError, AbstractionError, EvaluationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
