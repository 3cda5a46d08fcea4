import json
import subprocess
import sys

import pytest

from rcyclic import __version__
from rcyclic.cli import main
from rcyclic.rcyclic_exact import random_model, wishart_entry_model


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_nc(capsys):
    assert run(capsys, "nc", "3", "--count")[:2] == (0, "5\n")
    assert run(capsys, "nc", "4", "--count")[:2] == (0, "14\n")
    assert run(capsys, "nc", "1")[:2] == (0, "0\n")
    code, out, _ = run(capsys, "nc", "2", "--mobius")
    assert code == 0 and out.splitlines() == ["0,1\t1", "0/1\t-1"]


@pytest.mark.parametrize("argv", [["nc", "0"], ["nc", "15"], ["nc", "x"], [], ["bogus"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verify_identities(capsys):
    for d in ("4", "1"):
        code, out, _ = run(capsys, "verify-identities", "--d", d, "--samples", "3")
        data = json.loads(out)
        assert code == 0 and data["ok"] and data["schema"] == 1 and data["version"] == __version__
        assert data["config"]["params"]["d"] == int(d)
    assert run(capsys, "verify-identities", "--d", "0")[0] == 2
    assert run(capsys, "verify-identities", "--d", "65")[0] == 2


def test_verify_theorem_exact(capsys):
    code, out, _ = run(capsys, "verify-theorem", "--d1", "2", "--max-r", "4", "--max-moment", "6")
    data = json.loads(out)
    assert code == 0 and data["ok"]
    names = {ch["check"] for ch in data["checks"]}
    assert {"Y0 moment 6", "BN cumulant 6", "phi(w w^t)"} <= names
    assert all(r["summary"]["violations"] == 0 for r in data["reports"])


def test_verify_theorem_symbolic_table(capsys):
    code, out, _ = run(capsys, "verify-theorem", "--d1", "3", "--c", "c", "--max-r", "3",
                       "--max-moment", "4", "--format", "table")
    assert code == 0 and out.rstrip().endswith("verdict: PASS")


def test_verify_theorem_random_and_file(capsys, tmp_path):
    code, out, _ = run(capsys, "verify-theorem", "--d1", "3", "--model", "random", "--models", "2", "--max-r", "4")
    assert code == 0 and json.loads(out)["ok"]
    path = tmp_path / "model.json"
    path.write_text(random_model(2, 3).dumps(max_len=4))
    assert run(capsys, "verify-theorem", "--d1", "2", "--model", "file", "--model-file", str(path), "--max-r", "4")[0] == 0
    assert run(capsys, "verify-theorem", "--d1", "3", "--model", "file", "--model-file", str(path))[0] == 2
    assert run(capsys, "verify-theorem", "--d1", "2", "--model", "file")[0] == 2


def test_verify_theorem_failure_exit_code(capsys, tmp_path):
    path = tmp_path / "model.json"
    path.write_text(wishart_entry_model(2, 1).dumps())
    argv = ["verify-theorem", "--d1", "2", "--model", "file", "--model-file", str(path), "--max-r", "3", "--max-moment", "3"]
    assert run(capsys, *argv)[0] == 0
    # the file's cumulants belong to c = 1, so claiming c = 2 must fail
    code, out, _ = run(capsys, *argv, "--c", "2")
    data = json.loads(out)
    assert code == 1 and not data["ok"]
    assert any(not ch["ok"] for ch in data["checks"])


def test_bad_configuration(capsys):
    assert run(capsys, "verify-theorem", "--d1", "0")[0] == 2
    assert run(capsys, "verify-theorem", "--d1", "2", "--c", "-1")[0] == 2
    assert run(capsys, "verify-theorem", "--d1", "2", "--c", "1/0")[0] == 2
    assert run(capsys, "verify-theorem", "--d1", "2", "--max-r", "12")[0] == 2
    assert run(capsys, "verify-theorem", "--d1", "2", "--backend", "mc")[0] == 2
    assert run(capsys, "verify-theorem", "--d1", "2", "--backend", "mc", "--model", "random", "--d2", "3", "--p", "3")[0] == 2


def test_verify_theorem_mc_small(capsys):
    code, out, _ = run(capsys, "verify-theorem", "--d1", "2", "--backend", "mc", "--d2", "40", "--p", "80",
                       "--trials", "20", "--seed", "7", "--threads", "2")
    data = json.loads(out)
    assert code == 0 and data["ok"]
    rec = data["reports"][0]["records"][0]
    assert "stderr" in rec["value"][0]


def test_simulate_moments_is_byte_stable(capsys, tmp_path):
    argv = ["simulate", "--d1", "2", "--d2", "20", "--p", "40", "--trials", "5", "--seed", "1", "--emit", "moments"]
    code, first, _ = run(capsys, *argv)
    assert code == 0
    second = run(capsys, *argv)[1]
    assert first == second
    data = json.loads(first)
    assert data["schema"] == 1 and data["config"]["params"]["seed"] == 1
    assert abs(data["phi_w_wgamma"]["mean"] - 1.5) < 4 * data["phi_w_wgamma"]["stderr"] + 1e-9
    out = tmp_path / "m.json"
    assert main(argv + ["--output", str(out)]) == 0
    written = json.loads(out.read_text(encoding="utf-8"))
    assert written["config"]["params"].pop("output") == str(out)
    data["config"]["params"].pop("output")
    assert written == data


def test_simulate_results_do_not_depend_on_threads(capsys):
    base = ["simulate", "--d1", "2", "--d2", "10", "--p", "20", "--trials", "4", "--seed", "3"]
    a = json.loads(run(capsys, *base, "--threads", "1")[1])
    b = json.loads(run(capsys, *base, "--threads", "4")[1])
    for key in ("phi_w", "phi_w_wgamma", "phi_wgamma_2"):
        assert a[key] == b[key]


def test_simulate_spectrum(capsys):
    code, out, _ = run(capsys, "simulate", "--d1", "2", "--d2", "5", "--p", "10", "--trials", "3", "--emit", "spectrum")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "trial,eigenvalue" and len(lines) == 1 + 3 * 10
    assert run(capsys, "simulate", "--d1", "2", "--d2", "0", "--p", "1")[0] == 2


def test_seed_environment_variable(capsys, monkeypatch):
    monkeypatch.setenv("RCYCLIC_SEED", "99")
    code, out, _ = run(capsys, "simulate", "--d1", "1", "--d2", "3", "--p", "3", "--trials", "2")
    assert json.loads(out)["config"]["params"]["seed"] == 99


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rcyclic", "nc", "4", "--count"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "14\n"
