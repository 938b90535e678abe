"""JSON file formats for machines, decompositions and traces.

Machine::

    {"states": [...], "symbols": [...], "initial": [...], "transitions": [[src, sym, dst], ...]}

``initial`` is optional and defaults to all states.  Decomposition::

    {"p": 2, "maps": [{"a1": "alpha1", ...}, {...}]}

Trace: ``{"tau": 0, "symbols": [...]}`` or plain text with one symbol per
line (blank lines and ``#`` comments ignored).

Syntax errors raise :class:`~symest.errors.ParseError`; well-formed
documents that do not validate raise :class:`FormatError`.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import Machine, Trace
from .decomposition import AggregationMap, Decomposition
from .errors import InputError, ParseError


class FormatError(InputError):
    pass


def _parse_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid {what} JSON: {exc.msg}", exc.lineno, exc.colno) from None


def _string_list(doc, key, what):
    value = doc[key]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise FormatError(f"{what}: {key!r} must be a list of strings")
    return value


def _check_keys(doc, allowed, required, what):
    if not isinstance(doc, dict):
        raise FormatError(f"{what}: top level must be an object")
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise FormatError(f"{what}: unknown key {unknown[0]!r}")
    for key in required:
        if key not in doc:
            raise FormatError(f"{what}: missing key {key!r}")


def machine_from_dict(doc) -> Machine:
    _check_keys(doc, ("states", "symbols", "initial", "transitions"), ("states", "symbols", "transitions"), "machine")
    states = _string_list(doc, "states", "machine")
    symbols = _string_list(doc, "symbols", "machine")
    initial = _string_list(doc, "initial", "machine") if "initial" in doc else None
    transitions = doc["transitions"]
    if not isinstance(transitions, list):
        raise FormatError("machine: 'transitions' must be a list")
    for tr in transitions:
        if not isinstance(tr, list) or len(tr) != 3 or not all(isinstance(v, str) for v in tr):
            raise FormatError(f"machine: transition {tr!r} must be [source, symbol, target]")
    try:
        return Machine(states, symbols, transitions, initial)
    except InputError as exc:
        raise FormatError(f"machine: {exc}") from None


def machine_to_dict(m: Machine) -> dict:
    return {
        "states": list(m.states),
        "symbols": list(m.symbols),
        "initial": list(m.initial),
        "transitions": [list(tr) for tr in m.transitions],
    }


def _dump(doc, list_key):
    # one transition / map per line keeps files diffable
    lines = ["{"]
    keys = list(doc)
    for i, key in enumerate(keys):
        comma = "," if i < len(keys) - 1 else ""
        value = doc[key]
        if key == list_key:
            lines.append(f"  {json.dumps(key)}: [")
            for j, item in enumerate(value):
                sep = "," if j < len(value) - 1 else ""
                lines.append(f"    {json.dumps(item, ensure_ascii=False)}{sep}")
            lines.append(f"  ]{comma}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value, ensure_ascii=False)}{comma}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps_machine(m: Machine) -> str:
    return _dump(machine_to_dict(m), "transitions")


def loads_machine(text: str) -> Machine:
    return machine_from_dict(_parse_json(text, "machine"))


def decomposition_from_dict(doc, symbols=None) -> Decomposition:
    _check_keys(doc, ("p", "maps"), ("p", "maps"), "decomposition")
    p, maps = doc["p"], doc["maps"]
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise FormatError("decomposition: 'p' must be a positive integer")
    if not isinstance(maps, list) or len(maps) != p:
        raise FormatError(f"decomposition: expected {p} maps")
    for mp in maps:
        if not isinstance(mp, dict) or not all(isinstance(v, str) for v in mp.values()):
            raise FormatError("decomposition: each map must be an object of symbol -> label strings")
    try:
        return Decomposition(AggregationMap(mp, k, symbols) for k, mp in enumerate(maps, start=1))
    except InputError as exc:
        raise FormatError(f"decomposition: {exc}") from exc


def decomposition_to_dict(d: Decomposition) -> dict:
    return {"p": d.p, "maps": d.mappings()}


def dumps_decomposition(d: Decomposition) -> str:
    return _dump(decomposition_to_dict(d), "maps")


def loads_decomposition(text: str, symbols=None) -> Decomposition:
    return decomposition_from_dict(_parse_json(text, "decomposition"), symbols)


def trace_from_dict(doc) -> Trace:
    _check_keys(doc, ("tau", "symbols"), ("symbols",), "trace")
    tau = doc.get("tau", 0)
    if not isinstance(tau, int) or isinstance(tau, bool) or tau < 0:
        raise FormatError("trace: 'tau' must be a non-negative integer")
    return Trace(_string_list(doc, "symbols", "trace"), tau)


def loads_trace(text: str) -> Trace:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return trace_from_dict(_parse_json(text, "trace"))
    symbols = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if len(line.split()) != 1:
            raise FormatError(f"trace: expected one symbol per line, got {line!r}")
        symbols.append(line)
    return Trace(symbols)


def dumps_trace(w: Trace) -> str:
    return json.dumps({"tau": w.tau, "symbols": list(w.symbols)}, ensure_ascii=False) + "\n"


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None


def load_machine(path) -> Machine:
    return loads_machine(_read(path))


def load_decomposition(path, symbols=None) -> Decomposition:
    return loads_decomposition(_read(path), symbols)


def load_trace(path) -> Trace:
    return loads_trace(_read(path))


def save_machine(m: Machine, path):
    Path(path).write_text(dumps_machine(m), encoding="utf-8")


def save_decomposition(d: Decomposition, path):
    Path(path).write_text(dumps_decomposition(d), encoding="utf-8")


def save_trace(w: Trace, path):
    Path(path).write_text(dumps_trace(w), encoding="utf-8")


def to_dot(m: Machine, name="machine") -> str:
    """Graphviz text; parallel transitions between two states share one edge."""
    edges = {}
    for src, sym, dst in m.transitions:
        edges.setdefault((src, dst), []).append(sym)
    init = set(m.initial)
    lines = [f"digraph {json.dumps(name)} {{", "  rankdir=LR;"]
    for x in m.states:
        shape = "doublecircle" if x in init and len(init) < len(m.states) else "circle"
        lines.append(f"  {json.dumps(x)} [shape={shape}];")
    for (src, dst), syms in edges.items():
        lines.append(f"  {json.dumps(src)} -> {json.dumps(dst)} [label={json.dumps(', '.join(syms))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

