import json
import subprocess
import sys

import numpy as np
import pytest

from tracesel.io import write_csv
from tracesel.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, EXIT_PARSE, main


def run(argv, capsys, cwd=None, monkeypatch=None):
    if cwd is not None:
        monkeypatch.chdir(cwd)
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def strip_version(text):
    doc = json.loads(text)
    doc.pop("tool_version", None)
    return doc


def test_select_columns_toy(fixtures, capsys):
    code, out, _ = run(["select-columns", "--input", fixtures / "toy3.csv"], capsys)
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["chosen"] == [1, 2]
    assert doc["achieved_trace"] == pytest.approx(2.0, abs=1e-12)
    assert doc["bound"] == pytest.approx(3.0, abs=1e-12)
    assert doc["bound_name"] == "theorem1"
    assert [s["removed"] for s in doc["steps"]] == [3]


def test_select_blocks_zero_steps(fixtures, capsys):
    code, out, _ = run(["select-blocks", "--manifest", fixtures / "toy1" / "manifest.json", "--k", "2"], capsys)
    assert code == EXIT_OK and json.loads(out)["steps"] == []


def test_select_blocks_writes_file(fixtures, tmp_path, capsys):
    out_file = tmp_path / "r.json"
    code, out, _ = run(
        ["select-blocks", "--manifest", fixtures / "toy1" / "manifest.json", "--out", out_file], capsys
    )
    assert code == EXIT_OK and out == ""
    assert json.loads(out_file.read_text())["k"] == 1


def test_bound_command(capsys):
    code, out, _ = run(["bound", "--m", 3, "--n", 2, "--tr-ainv", 1.5], capsys)
    assert code == EXIT_OK
    assert json.loads(out) == {"bound": 3.0, "bound_name": "theorem1", "inputs": {"m": 3, "n": 2, "k": 2, "tr_ainv": 1.5}}
    code, out, _ = run(["bound", "--m", 6, "--n", 3, "--r", 1], capsys)
    assert json.loads(out)["bound"] == 9
    code, out, _ = run(["bound", "--m", 20, "--n", 8, "--k", 10, "--tr-ainv", 1.0], capsys)
    assert json.loads(out)["bound"] == pytest.approx(13 / 3)
    assert set(json.loads(out)) == {"bound", "bound_name", "inputs"}


def test_oracle_command(fixtures, capsys):
    code, out, _ = run(["oracle", "--manifest", fixtures / "blocks_n4_m9" / "manifest.json", "--k", "5"], capsys)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["passed"]
    greedy = doc["greedy"]
    assert doc["best_value"] <= greedy["achieved_trace"] * (1 + 1e-10) <= greedy["bound"] * (1 + 1e-8)
    assert doc["enumerated"] == 126


def test_oracle_too_large(fixtures, capsys):
    code, _, err = run(
        ["oracle", "--manifest", fixtures / "blocks_n4_m9" / "manifest.json", "--k", "5", "--enum-cap", "10"], capsys
    )
    assert code == EXIT_INVALID and "exceeds cap" in err


def test_exit_code_parse(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("1,2\n3\n")
    code, _, err = run(["select-columns", "--input", f], capsys)
    assert code == EXIT_PARSE and "line 2" in err


def test_exit_code_missing_file(tmp_path, capsys):
    code, _, _ = run(["select-columns", "--input", tmp_path / "nope.csv"], capsys)
    assert code == EXIT_PARSE


def test_exit_code_validation(tmp_path, capsys):
    (tmp_path / "e1.csv").write_text("1,0\n0,0\n")
    (tmp_path / "m.json").write_text(json.dumps(
        {"n": 2, "fixed": None, "candidates": [{"file": "e1.csv", "form": "explicit"}] * 2}
    ))
    code, _, err = run(["select-blocks", "--manifest", tmp_path / "m.json"], capsys)
    assert code == EXIT_INVALID and "rank" in err


def test_exit_code_k_out_of_range(fixtures, capsys):
    code, _, _ = run(["select-columns", "--input", fixtures / "toy3.csv", "--k", "1"], capsys)
    assert code == EXIT_INVALID


def test_exit_code_numerical(tmp_path, capsys, rng):
    # cond(U U^T) = 1e10 passes the rank test but misses the inverse residual check
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    write_csv(tmp_path / "u.csv", q @ np.diag([1.0, 1.0, 1.0, 1e-5]))
    code, _, err = run(["select-columns", "--input", tmp_path / "u.csv"], capsys)
    assert code == EXIT_NUMERICAL and "residual" in err


def test_gen_then_select(tmp_path, capsys):
    code, out, _ = run(["gen", "--kind", "blocks", "--n", 3, "--m", 6, "--seed", 5, "--out", tmp_path / "b"], capsys)
    assert code == EXIT_OK
    manifest = out.strip()
    code, out, _ = run(["select-blocks", "--manifest", manifest], capsys)
    assert code == EXIT_OK and len(json.loads(out)["chosen"]) == 3
    code, out, _ = run(["gen", "--kind", "columns", "--n", 3, "--m", 6, "--seed", 5, "--out", tmp_path / "c"], capsys)
    code, out, _ = run(["select-columns", "--input", out.strip(), "--k", 4], capsys)
    assert code == EXIT_OK and json.loads(out)["bound_name"] == "corollary6"


def test_gen_is_reproducible(tmp_path, capsys):
    for d in ("a", "b"):
        run(["gen", "--kind", "blocks", "--n", 3, "--m", 5, "--seed", 9, "--fixed-rank", 1, "--out", tmp_path / d], capsys)
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def _cases(fixtures_dir):
    return json.loads((fixtures_dir / "golden" / "cases.json").read_text()).items()


def _golden_params():
    from conftest import FIXTURES

    return [pytest.param(name, argv, id=name) for name, argv in _cases(FIXTURES)]


@pytest.mark.parametrize("name,argv", _golden_params())
def test_golden(name, argv, fixtures, capsys, monkeypatch):
    code, out, _ = run(argv, capsys, cwd=fixtures, monkeypatch=monkeypatch)
    assert code == EXIT_OK
    golden = (fixtures / "golden" / f"{name}.json").read_text()
    # byte comparison of everything except the version line
    strip = lambda t: [ln for ln in t.splitlines() if '"tool_version"' not in ln]
    assert strip(out) == strip(golden)


def test_deterministic_output(fixtures, capsys, monkeypatch):
    argv = ["select-blocks", "--manifest", "blocks_n4_m9/manifest.json", "--k", "5"]
    outs = {run(argv, capsys, cwd=fixtures, monkeypatch=monkeypatch)[1] for _ in range(3)}
    assert len(outs) == 1


def test_module_entry_point(fixtures):
    proc = subprocess.run(
        [sys.executable, "-m", "tracesel", "select-columns", "--input", str(fixtures / "toy3.csv")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["chosen"] == [1, 2]
