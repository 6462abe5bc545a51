import subprocess
import sys

import pytest

from nodal_atlas.cli import main
from nodal_atlas.waveform import eval_direct, truncation_error_bound

from conftest import EVEN_PATH, ODD_PATH

E, O = str(EVEN_PATH), str(ODD_PATH)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, dict(line.split("=", 1) for line in out.out.splitlines()), out


def test_eval_matches_library(capsys, even):
    code, kv, _ = run(capsys, "eval", "--form", E, "--x", "0.2", "--y", "1.3")
    assert code == 0
    assert float(kv["result.phi"]) == eval_direct(even, 0.2, 1.3)
    assert float(kv["result.est_error"]) == truncation_error_bound(even, 1.3)
    assert kv["input.parity"] == "even"


def test_sign_changes(capsys, tmp_path):
    csv = tmp_path / "c.csv"
    code, kv, _ = run(capsys, "sign-changes", "--form", E, "--horocycle", "2.19", "--csv", str(csv))
    assert code == 0 and kv["result.sign_changes"] == "2"
    assert csv.read_text().startswith("location,refined,residual,tangential\n")
    code, kv, _ = run(capsys, "sign-changes", "--form", E, "--delta", "delta1", "--range", "0.5", "2.5")
    assert code == 0 and int(kv["result.sign_changes"]) == 4


def test_restrict(capsys):
    code, kv, _ = run(capsys, "restrict", "--form", E, "--horocycle", "1.0")
    assert code == 0 and kv["check.parseval"].startswith("pass")
    code, kv, _ = run(capsys, "restrict", "--form", E, "--geodesic", "--a", "1", "--b", "0.25")
    assert code == 0 and float(kv["result.norm"]) > 0


def test_nodal_count(capsys, tmp_path):
    pgm, csv = tmp_path / "n.pgm", tmp_path / "n.csv"
    code, kv, _ = run(capsys, "nodal", "count", "--form", E, "--ymin", "0.85", "--ymax", "6", "--res", "8",
                      "--pgm", str(pgm), "--csv", str(csv))
    assert code == 0
    assert kv["result.N"] == "4" and kv["check.partition"] == "pass"
    assert kv["check.theorem21"].startswith("pass")
    assert pgm.read_bytes().startswith(b"P5\n")
    assert len(csv.read_text().splitlines()) == 5


def test_nodal_csv_thread_independent(capsys, tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("NODAL_ATLAS_THREADS", threads)
        csv = tmp_path / f"n{threads}.csv"
        _, _, out = run(capsys, "nodal", "count", "--form", O, "--res", "8", "--csv", str(csv))
        outs.append((out.out, csv.read_bytes()))
    assert outs[0] == outs[1]


def test_rw_predict(capsys):
    code, kv, _ = run(capsys, "rw", "predict", "--r", "100", "--Y", "1")
    assert code == 0 and float(kv["result.expected_count"]) == pytest.approx(22.5846755946, rel=1e-9)


@pytest.mark.parametrize("kind,key", [("shortsum", "result.ratio_1"), ("aa2", "result.sum"),
                                      ("poincare", "result.value"), ("cusp-mass", "result.mass")])
def test_que(capsys, kind, key):
    code, kv, _ = run(capsys, "que", kind, "--form", E)
    assert code == 0 and key in kv


def test_mellin_and_check_failure(capsys):
    code, kv, _ = run(capsys, "mellin-check", "--form", E, "--tprobe", "0", "2")
    assert code == 0 and kv["check.mellin_0"].startswith("pass")
    code, kv, _ = run(capsys, "mellin-check", "--form", E, "--tprobe", "0", "--tol", "1e-30")
    assert code == 2 and kv["check.mellin_0"].startswith("FAIL")


def test_verify_module(capsys, tmp_path):
    summary = tmp_path / "s.txt"
    code, kv, out = run(capsys, "--summary", str(summary), "verify", "coeffs", "--form", E, "--form", O)
    assert code == 0
    assert summary.read_text() == out.out
    assert kv["check.even.coeffs.multiplicative"].startswith("pass")
    assert kv["check.odd.coeffs.multiplicative"].startswith("pass")
    assert "wall_time" in out.err


def test_usage_errors(capsys):
    assert main(["eval", "--form", E, "--x", "0.2", "--y", "1.3", "--bogus"]) == 1
    assert main(["frobnicate"]) == 1
    err = capsys.readouterr().err
    assert "unrecognized arguments: --bogus" in err and "invalid choice" in err
    assert main(["verify", "nothing"]) == 1
    assert "unknown module" in capsys.readouterr().err


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.mf"
    bad.write_text("maassform v1\nt = 1\n")
    assert main(["eval", "--form", str(bad), "--x", "0", "--y", "1"]) == 1
    assert main(["eval", "--form", str(tmp_path / "missing.mf"), "--x", "0", "--y", "1"]) == 1
    assert "error:" in capsys.readouterr().err


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "nodal_atlas.cli", "rw", "predict", "--r", "30", "--Y", "1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "command=rw predict" in out.stdout
