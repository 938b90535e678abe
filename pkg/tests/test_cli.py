import json
import subprocess
import sys

import pytest

import symest.verify as verify_mod
from symest import data_path
from symest.cli import main
from symest.decomposition import check_consistency
from symest.io import load_decomposition, load_machine


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


def test_estimate(capsys, files):
    code, out, _ = run(capsys, "estimate", data_path("chain_machine.json"), files("t", "a1\nb1\n"), "--predict")
    assert code == 0
    assert out.splitlines()[-1].endswith("chi=[x2] rho=[x3]")


def test_estimate_rejected(capsys, files):
    code, out, _ = run(capsys, "estimate", data_path("chain_machine.json"), files("t", "a1\na1\n"))
    assert code == 3 and out.splitlines()[-1].endswith("chi=[]")


def test_estimate_empty_trace(capsys, files):
    code, _, err = run(capsys, "estimate", data_path("chain_machine.json"), files("t", ""))
    assert code == 2 and "empty" in err


def test_estimate_json_and_window(capsys, files):
    trace = files("t.json", '{"tau": 0, "symbols": ["a1", "a1", "b1"]}')
    code, out, _ = run(capsys, "estimate", data_path("chain_machine.json"), trace, "--json", "--window", "2")
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert records[-1] == {"t": 2, "symbol": "b1", "chi": ["x2"], "rho": ["x3"]}


def test_parse_and_validation_errors(capsys, files):
    assert run(capsys, "estimate", files("m", "{oops"), files("t", "a\n"))[0] == 1
    assert run(capsys, "estimate", files("m", '{"states": []}'), files("t", "a\n"))[0] == 2
    assert run(capsys, "estimate", data_path("chain_machine.json"), files("t", "zz\n"))[0] == 2
    assert run(capsys, "estimate", data_path("chain_machine.json"), "/nonexistent/t")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_decompose_chain(capsys, tmp_path):
    out_file = tmp_path / "d.json"
    code, out, _ = run(capsys, "decompose", data_path("two_chain_machine.json"), "--p", 2, "--out", out_file)
    assert code == 0 and "1: a1 b1 c1 d1" in out
    d = load_decomposition(out_file)
    assert check_consistency(d) is None and d.p == 2


def test_decompose_chain_structure_of_cycle(capsys):
    code, out, _ = run(capsys, "decompose", data_path("chain_machine.json"), "--p", 2)
    doc = json.loads(out[out.index("{"):])
    assert code == 0 and doc["p"] == 2 and len(doc["maps"]) == 2


def test_decompose_not_chain(capsys):
    code, out, _ = run(capsys, "decompose", data_path("nonchain_machine.json"))
    assert code == 4
    assert "symbol 'a' enters 'x3' from both 'x1' and 'x2'" in out


def test_decompose_quotient_then_distributed(capsys, tmp_path, files):
    d = tmp_path / "d.json"
    code, out, _ = run(capsys, "decompose", data_path("nonchain_machine.json"), "--strategy", "quotient",
                       "--p", 1, "--out", d)
    assert code == 0 and "z1: x1 x2 x3" in out
    code, out, _ = run(capsys, "distributed", data_path("nonchain_machine.json"), d, files("t", "a\na\na\n"))
    assert code == 0 and "OVERAPPROX" not in out and out.count("EXACT") == 3


def test_decompose_iso(capsys, tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({
        "states": ["p", "q"], "symbols": ["u|0", "u|1", "v|0"],
        "transitions": [["p", "u|0", "q"], ["q", "u|1", "p"], ["p", "v|0", "p"], ["q", "v|0", "q"]],
    }))
    code, out, _ = run(capsys, "decompose", m, "--strategy", "iso", "--sep", "|", "--p", 1)
    assert code == 0 and "1: u|0 u|1" in out and "2: v|0" in out


def test_distributed_flags(capsys, files):
    m = files("m.json", json.dumps({
        "states": ["x0", "x1"], "symbols": ["a", "b", "c", "d"],
        "transitions": [["x0", "a", "x0"], ["x1", "b", "x1"], ["x1", "c", "x1"]],
    }))
    d = files("d.json", json.dumps({"p": 2, "maps": [{"a": "u", "b": "u", "c": "v", "d": "v"},
                                                      {"a": "p", "b": "q", "c": "p", "d": "q"}]}))
    code, out, _ = run(capsys, "distributed", m, d, files("t", "a\n"), "--json")
    rec = json.loads(out)
    assert code == 0 and rec["flag"] == "OVERAPPROX"
    assert rec["chi"] == ["x0", "x1"] and rec["monolithic_chi"] == ["x0"]

    ident = files("i.json", json.dumps({"p": 1, "maps": [{s: s for s in "abcd"}]}))
    code, out, _ = run(capsys, "distributed", m, ident, files("t2", "a\na\n"))
    assert code == 0 and out.count("EXACT") == 2


def test_distributed_chain_example(capsys, files):
    code, out, _ = run(capsys, "distributed", data_path("chain_machine.json"), data_path("chain_decomposition.json"),
                       files("t", "a1\nb1\n"))
    assert code == 0 and out.count("EXACT") == 2 and "OVERAPPROX" not in out


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "all", "--trials", 5, "--seed", 7)
    assert code == 0 and out.count("PASS") == 5


def test_verify_zero_trials(capsys):
    assert run(capsys, "verify", "--trials", 0)[0] == 2


def test_verify_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("SYMEST_SEED", "3")
    a = run(capsys, "verify", "--suite", "overapprox", "--trials", 3, "--seed", 1)[1]
    b = run(capsys, "verify", "--suite", "overapprox", "--trials", 3, "--seed", 99)[1]
    assert a == b
    monkeypatch.setenv("SYMEST_SEED", "x")
    assert run(capsys, "verify", "--trials", 1)[0] == 2


def test_verify_reports_mutation(capsys, monkeypatch):
    def no_intersection(m, w):
        return m.all_states()

    monkeypatch.setattr(verify_mod, "estimate", no_intersection)
    code, out, _ = run(capsys, "verify", "--suite", "oracle", "--trials", 3)
    assert code == 5 and "witness" in out and "FAIL oracle" in out


def test_random(capsys, tmp_path):
    out_file = tmp_path / "m.json"
    code, _, _ = run(capsys, "random", "--states", 4, "--symbols", 3, "--seed", 1, "--chain-decomposable",
                     "--out", out_file)
    m = load_machine(out_file)
    assert code == 0 and len(m.states) == 4 and len(m.symbols) == 3
    code, out, _ = run(capsys, "random", "--seed", 1, "--non-injective", "--dot")
    assert code == 0 and out.startswith("digraph")
    assert run(capsys, "random", "--density", 2)[0] == 2


def test_abstract(capsys, tmp_path):
    code, out, _ = run(capsys, "abstract", "--field=-x1", "--box", -1, 1, "--cells", 3, "--ts", 5)
    m = json.loads(out)
    assert code == 0 and ["c0", "c0", "c1"] in m["transitions"]
    code, out, _ = run(capsys, "abstract", "--field", "x2 ; -x1", "--box", -1, 1, -1, 1, "--cells", 4,
                       "--ts", 0.1, "--dot")
    assert code == 0 and "digraph" in out
    assert run(capsys, "abstract", "--field", "x1 +", "--box", 0, 1, "--cells", 1, "--ts", 1)[0] == 1
    assert run(capsys, "abstract", "--field", "x1", "--box", 0, 1, 2, "--cells", 1, "--ts", 1)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "symest", "decompose", str(data_path("nonchain_machine.json"))],
                          capture_output=True, text=True)
    assert proc.returncode == 4
