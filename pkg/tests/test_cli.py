import io
import json
import subprocess
import sys

import pytest

from hornfall.cli import GAMMA_SCHEMA, PREDICT_SCHEMA, PROBE_SCHEMA, dispatch
from hornfall.experiments import COLUMNS, SCHEMA

SUBCOMMANDS = ["gen", "solve", "predict", "gamma", "automaton", "sweep", "probe"]


def run(argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin)
    try:
        code = dispatch(argv, out, err)
    finally:
        if stdin is not None:
            sys.stdin = old
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_help(cmd, capsys):
    assert dispatch([cmd, "--help"]) == 0
    assert "usage: hornfall " + cmd in capsys.readouterr().out


def test_predict_golden():
    code, out, _ = run(["predict", "--k", "3", "--d", "0.1,0,3.1"])
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["schema", "k", "d", "t0", "phi", "derivative_at_root", "simple"]
    assert doc["schema"] == PREDICT_SCHEMA
    assert doc["t0"] == pytest.approx(0.943, abs=1e-3)
    assert doc["phi"] == pytest.approx(0.064, abs=1e-3)
    assert doc["simple"] is True


def test_predict_pads_k():
    _, out, _ = run(["predict", "--k", "4", "--d", "0.1,1.0"])
    assert json.loads(out)["d"] == [0.1, 1.0, 0.0, 0.0]


def test_gamma_golden():
    code, out, _ = run(["gamma", "--d3", "2"])
    doc = json.loads(out)
    assert code == 0 and list(doc) == ["schema", "d3", "d1", "t_tangent"]
    assert doc["schema"] == GAMMA_SCHEMA
    assert doc["d1"] == pytest.approx(0.17563936464993601, abs=1e-15)


def test_gamma_range_golden():
    code, out, _ = run(["gamma", "--d3-range", "2:3:0.5"])
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == f"# schema: {GAMMA_SCHEMA}" and lines[1] == "d3,d1,t_tangent"
    assert [ln.split(",")[0] for ln in lines[2:]] == ["2.0", "2.5", "3.0"]


def test_gen_solve_pipeline():
    code, text, _ = run(["gen", "--n", "100", "--d", "0.1,1.0", "--seed", "7"])
    assert code == 0 and text.startswith("p hcnf 100 ")
    code, out, _ = run(["solve", "-"], stdin=text)
    assert code in (10, 20)
    verdict = out.splitlines()[0]
    assert verdict in ("s SATISFIABLE", "s UNSATISFIABLE")
    assert (code == 10) == (verdict == "s SATISFIABLE")
    assert out.splitlines()[1].startswith("c backbone_size ")


def test_gen_to_file(tmp_path):
    path = tmp_path / "f.hcnf"
    code, out, _ = run(["gen", "--n", "20", "--d", "0.1,0,1.0", "--seed", "1", "-o", str(path)])
    assert code == 0 and out == ""
    code, out, _ = run(["solve", str(path), "--backbone"])
    assert code in (10, 20)
    last = out.splitlines()[-1]
    assert last.startswith("b ") and last.endswith("0")


def test_solve_exit_codes(tmp_path):
    unsat = tmp_path / "u.hcnf"
    unsat.write_text("p hcnf 2 3\n-1 0\n2 0\n1 -2 0\n")
    code, out, _ = run(["solve", str(unsat), "--backbone"])
    assert code == 20 and "c backbone_size 2" in out and "b 1 2 0" in out
    code, out, _ = run(["solve", "-"], stdin="p hcnf 2 1\n-1 0\n")
    assert code == 10


def test_usage_errors():
    code, _, err = run(["predict", "--k", "3"])
    assert code == 1 and "usage:" in err
    code, _, err = run(["solve", "x", "--bogus"])
    assert code == 1 and "usage:" in err
    code, _, _ = run([])
    assert code == 1
    code, _, _ = run(["predict", "--d", "1.5"])
    assert code == 1
    code, _, _ = run(["gamma", "--d3", "3", "--d3-range", "2:3:1"])
    assert code == 1


def test_runtime_errors(tmp_path):
    code, _, err = run(["solve", str(tmp_path / "missing.hcnf")])
    assert code == 2 and err
    code, _, err = run(["solve", "-"], stdin="p hcnf 2 1\n1 2 0\n")
    assert code == 2 and "line 2" in err
    code, _, _ = run(["gamma", "--d3", "1.5"])
    assert code == 2


AUT = "aut tree 3 1\nstart 1\nfinal 3\n2 1 3 3\n1 1 2 3\n"


def test_automaton_stdin():
    code, out, _ = run(["automaton", "-", "--check-empty"], stdin=AUT)
    assert code == 0 and out == "nonempty\n"
    code, out, _ = run(["automaton", "-", "--emit-horn"], stdin=AUT)
    assert code == 0
    horn = "\n".join(ln for ln in out.splitlines() if not ln.startswith("c")) + "\n"
    code, out, _ = run(["solve", "-"], stdin=horn)
    assert code == 20


def test_automaton_needs_mode():
    assert run(["automaton", "-"], stdin=AUT)[0] == 1


def test_sweep_golden(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("k=2\nd1=0.1\nd2=0.5,1.5\nn=300\ntrials=4\nseed=2\n")
    code, out, _ = run(["sweep", "--config", str(cfg)])
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == f"# schema: {SCHEMA}"
    assert lines[1] == ",".join(COLUMNS)
    assert len(lines) == 4
    target = tmp_path / "out.csv"
    code, out, _ = run(["sweep", "--config", str(cfg), "--output", str(target)])
    assert code == 0 and out == ""
    assert target.read_text().splitlines() == lines


def test_sweep_bad_config(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("k=2\nwhat=1\n")
    assert run(["sweep", "--config", str(cfg)])[0] == 2


def test_probe_golden():
    code, out, _ = run(["probe", "--d1", "0.1", "--d3", "3", "--window", "0.1"])
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == PROBE_SCHEMA
    assert list(doc) == ["schema", "d1", "d3", "window", "phi_below", "phi_above",
                         "empirical_below", "empirical_above"]
    assert doc["phi_below"] == pytest.approx(0.905, abs=1e-3)


def test_console_script():
    out = subprocess.run(["hornfall", "gamma", "--d3", "2"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["t_tangent"] == 0.5
    out = subprocess.run([sys.executable, "-m", "hornfall.cli", "predict", "--k", "2"], capture_output=True, text=True)
    assert out.returncode == 1 and "usage:" in out.stderr
