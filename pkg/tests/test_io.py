import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracesel.errors import EmptyFile, ParseError, ValidationFailed
from tracesel.generate import random_block_problem
from tracesel.io import (
    dumps,
    parse_block_manifest,
    parse_matrix_file,
    report_to_dict,
    write_block_manifest,
    write_csv,
    write_matrix_market,
)
from tracesel.problem import ColumnProblem
from tracesel.selection import run_block_selection, run_column_selection


def test_csv_identity(tmp_path):
    f = tmp_path / "i.csv"
    f.write_text("1,0\n0,1")
    np.testing.assert_array_equal(parse_matrix_file(f), np.eye(2))


def test_matrix_market_column_major(tmp_path):
    f = tmp_path / "i.mtx"
    f.write_text("%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n0\n0\n1\n")
    np.testing.assert_array_equal(parse_matrix_file(f), np.eye(2))
    g = tmp_path / "r.mtx"
    g.write_text("%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n")
    np.testing.assert_array_equal(parse_matrix_file(g), [[1, 3, 5], [2, 4, 6]])


def test_csv_ragged_names_line(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("1,2\n3,4\n5\n")
    with pytest.raises(ParseError, match="line 3") as info:
        parse_matrix_file(f)
    assert info.value.line == 3


def test_csv_bad_number_names_column(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("1,2\n3,x\n")
    with pytest.raises(ParseError) as info:
        parse_matrix_file(f)
    assert (info.value.line, info.value.column) == (2, 2)


def test_empty_file(tmp_path):
    f = tmp_path / "e.csv"
    f.write_text("\n\n")
    with pytest.raises(EmptyFile):
        parse_matrix_file(f)


def test_matrix_market_rejects_coordinate(tmp_path):
    f = tmp_path / "c.mtx"
    f.write_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n")
    with pytest.raises(ParseError, match="unsupported"):
        parse_matrix_file(f)


def test_matrix_market_wrong_count(tmp_path):
    f = tmp_path / "w.mtx"
    f.write_text("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n")
    with pytest.raises(ParseError, match="expected 4"):
        parse_matrix_file(f)


@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_writers_round_trip(tmp_path_factory, r, c, seed):
    a = np.random.default_rng(seed).standard_normal((r, c)) * 10.0 ** np.random.default_rng(seed).integers(-20, 20)
    d = tmp_path_factory.mktemp("rt")
    write_csv(d / "a.csv", a)
    write_matrix_market(d / "a.mtx", a)
    np.testing.assert_array_equal(parse_matrix_file(d / "a.csv"), a)
    np.testing.assert_array_equal(parse_matrix_file(d / "a.mtx"), a)


def test_manifest_toy(fixtures):
    p = parse_block_manifest(fixtures / "toy1" / "manifest.json")
    assert (p.n, p.m) == (1, 2)
    r = run_block_selection(p, 1)
    assert r.achieved_trace == pytest.approx(1.0, abs=1e-12)


def test_manifest_rank_failure(tmp_path):
    (tmp_path / "e1.csv").write_text("1,0\n0,0\n")
    (tmp_path / "m.json").write_text(json.dumps({
        "n": 2, "fixed": None,
        "candidates": [{"file": "e1.csv", "form": "explicit"}, {"file": "e1.csv", "form": "explicit"}],
    }))
    with pytest.raises(ValidationFailed) as info:
        parse_block_manifest(tmp_path / "m.json")
    assert not info.value.summary["rank"].passed
    assert info.value.summary["psd"].passed


def test_manifest_factor_dimension_mismatch(tmp_path):
    (tmp_path / "g.csv").write_text("1\n2\n3\n")
    (tmp_path / "i.csv").write_text("1,0\n0,1\n")
    (tmp_path / "m.json").write_text(json.dumps({
        "n": 2, "fixed": None,
        "candidates": [{"file": "i.csv", "form": "explicit"}, {"file": "g.csv", "form": "factor"}],
    }))
    with pytest.raises(ValidationFailed) as info:
        parse_block_manifest(tmp_path / "m.json")
    assert not info.value.summary["dimensions"].passed


def test_manifest_bad_json(tmp_path):
    (tmp_path / "m.json").write_text("{\"n\": 2,")
    with pytest.raises(ParseError):
        parse_block_manifest(tmp_path / "m.json")


def test_manifest_round_trip(tmp_path, rng):
    p = random_block_problem(3, 6, rng, fixed_rank=1)
    q = parse_block_manifest(write_block_manifest(tmp_path, p))
    np.testing.assert_array_equal(q.total(), p.total())
    assert [b.form for b in q.candidates] == [b.form for b in p.candidates]


def test_report_json_round_trip(rng):
    u = rng.standard_normal((4, 11))
    r = run_column_selection(ColumnProblem(u, fixed=(2,)), 4)
    doc = json.loads(dumps(report_to_dict(r, "x", kept=(2,))))
    assert doc["chosen"] == [i + 1 for i in r.chosen]
    assert doc["achieved_trace"] == r.achieved_trace
    assert doc["bound"] == r.bound
    assert [s["trace_after"] for s in doc["steps"]] == [s.trace_after for s in r.steps]
    assert [s["alpha"] for s in doc["steps"]] == [s.alpha for s in r.steps]


def test_dumps_uses_17_digits():
    assert dumps({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}\n'
    assert dumps({"x": 2.0, "l": []}) == '{\n  "x": 2.0,\n  "l": []\n}\n'


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_dumps_float_round_trip(x):
    assert json.loads(dumps([x, 1]))[0] == x
