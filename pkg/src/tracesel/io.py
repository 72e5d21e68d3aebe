"""Matrix files, block manifests and JSON reports.

Two matrix formats are read: Matrix Market dense arrays
(``%%MatrixMarket matrix array real general``, column-major) and plain CSV
with one matrix row per line. Indices in manifests and reports are 1-based.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import EmptyFile, InvalidArgument, ParseError, ValidationFailed
from .linalg import PsdBlock
from .problem import BlockProblem, Check, ValidationSummary, validate_block_problem

MM_HEADER = "%%MatrixMarket matrix array real general"


def _parse_float(token, path, line, column):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token.strip()!r}", path, line, column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token.strip()!r}", path, line, column)
    return value


def _read_matrix_market(lines, path):
    header = lines[0][1].strip()
    if " ".join(header.lower().split()) != MM_HEADER.lower():
        raise ParseError(f"unsupported Matrix Market header {header!r}", path, lines[0][0])
    body = [(no, text) for no, text in lines[1:] if text.strip() and not text.startswith("%")]
    if not body:
        raise ParseError("missing size line", path)
    size_no, size_text = body[0]
    parts = size_text.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ParseError(f"expected 'rows cols', got {size_text.strip()!r}", path, size_no)
    rows, cols = int(parts[0]), int(parts[1])
    values = []
    for no, text in body[1:]:
        for col, tok in enumerate(text.split(), start=1):
            values.append(_parse_float(tok, path, no, col))
    if len(values) != rows * cols:
        raise ParseError(f"expected {rows * cols} entries, found {len(values)}", path)
    if rows * cols == 0:
        raise EmptyFile("matrix has no entries", path)
    return np.array(values).reshape((rows, cols), order="F")


def _read_csv(lines, path):
    rows = []
    width = None
    for no, text in lines:
        if not text.strip():
            continue
        fields = next(csv.reader([text]))
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ParseError(
                f"row has {len(fields)} fields, expected {width}", path, no
            )
        rows.append([_parse_float(tok, path, no, col) for col, tok in enumerate(fields, start=1)])
    if not rows:
        raise EmptyFile("no data rows", path)
    return np.array(rows)


def parse_matrix_file(path) -> np.ndarray:
    """Read a dense real matrix from Matrix Market array format or CSV.

    Raises
    ------
    EmptyFile
        If the file holds no entries.
    ParseError
        With the offending line (and column where known).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path) from exc
    lines = list(enumerate(text.splitlines(), start=1))
    lines = [(no, t) for no, t in lines if t.strip()] or []
    if not lines:
        raise EmptyFile("file is empty", path)
    if lines[0][1].startswith("%%MatrixMarket"):
        return _read_matrix_market(lines, path)
    return _read_csv(lines, path)


def write_matrix_market(path, a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    out = [MM_HEADER, f"{a.shape[0]} {a.shape[1]}"]
    out += [_fmt(v) for v in a.ravel(order="F")]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def write_csv(path, a):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    text = "\n".join(",".join(_fmt(v) for v in row) for row in a)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _dimension_failure(detail):
    checks = [Check("dimensions", False, detail)]
    checks += [Check(c, False, "skipped: dimension check failed")
               for c in ("symmetry", "psd", "reconstruction", "rank")]
    return ValidationFailed(ValidationSummary(tuple(checks)))


def _load_block(entry, base, n, what):
    if not isinstance(entry, dict) or "file" not in entry:
        raise ParseError(f"{what}: expected an object with a 'file' key")
    form = entry.get("form", "explicit")
    if form not in ("explicit", "factor"):
        raise ParseError(f"{what}: unknown form {form!r}")
    a = parse_matrix_file(base / entry["file"])
    label = entry.get("label")
    if a.shape[0] != n:
        raise _dimension_failure(f"{what} has {a.shape[0]} rows, expected n={n}")
    if form == "explicit":
        if a.shape[1] != n:
            raise _dimension_failure(f"{what} is {a.shape[0]}x{a.shape[1]}, expected {n}x{n}")
        return PsdBlock.explicit(a, label=label)
    return PsdBlock.from_factor(a, label=label)


def parse_block_manifest(path) -> BlockProblem:
    """Load and validate a JSON block manifest.

    The manifest looks like ``{"n": 3, "fixed": {"file": ..., "form":
    "explicit" | "factor"} | null, "candidates": [{"file": ..., "form": ...,
    "label": ...}, ...]}``. File paths are relative to the manifest.

    Raises
    ------
    ParseError
        On malformed JSON or matrix files.
    ValidationFailed
        If the loaded problem fails :func:`validate_block_problem`.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read manifest: {exc.strerror}", path) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, exc.lineno, exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParseError("manifest must be a JSON object", path)
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}", path)
    cands = doc.get("candidates")
    if not isinstance(cands, list) or not cands:
        raise ParseError("'candidates' must be a non-empty list", path)
    base = path.parent
    fixed = doc.get("fixed")
    fixed = _load_block(fixed, base, n, "fixed block") if fixed is not None else None
    blocks = [_load_block(c, base, n, f"candidate {i + 1}") for i, c in enumerate(cands)]
    problem = BlockProblem.build(blocks, fixed=fixed, n=n)
    summary = validate_block_problem(problem)
    if not summary.passed:
        raise ValidationFailed(summary)
    return problem


def write_block_manifest(directory, problem: BlockProblem, name="manifest.json"):
    """Write ``problem`` as Matrix Market files plus a manifest; returns its path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def entry(block, stem):
        fname = f"{stem}.mtx"
        data = block.matrix if block.form == "explicit" else block.factor
        write_matrix_market(directory / fname, data)
        out = {"file": fname, "form": block.form}
        if block.label:
            out["label"] = block.label
        return out

    doc = {
        "n": problem.n,
        "fixed": None if problem.fixed.is_zero() else entry(problem.fixed, "fixed"),
        "candidates": [entry(b, f"B{i + 1}") for i, b in enumerate(problem.candidates)],
    }
    out = directory / name
    out.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return out


def _fmt(x):
    s = "%.17g" % x
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _dump(obj, indent, level=0):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise InvalidArgument(f"cannot serialize non-finite number {obj!r}")
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(str(int(v)) for v in obj) + "]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise InvalidArgument(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with every float written to 17 significant digits."""
    return _dump(obj, indent) + "\n"


def report_to_dict(report, tool_version, kept=None):
    """JSON-ready view of a :class:`SelectionReport` with 1-based indices."""
    doc = {
        "chosen": [i + 1 for i in report.chosen],
        "achieved_trace": report.achieved_trace,
        "bound": report.bound,
        "bound_name": report.bound_name,
        "k": report.k,
        "k_min": report.k_min,
        "n": report.n,
        "m": report.m,
    }
    if kept is not None:
        doc["kept"] = [i + 1 for i in kept]
    doc["steps"] = [
        {
            "removed": s.removed_index + 1,
            "alpha": s.alpha,
            "margin": s.margin,
            "trace_after": s.trace_after,
        }
        for s in report.steps
    ]
    doc["refactorizations"] = report.refactorizations
    doc["tool_version"] = tool_version
    return doc
