"""Rewrite the CLI golden files under tests/fixtures/golden/.

Run after an intentional change to the report format or algorithm, then
review the diff before committing.
"""

import contextlib
import io
import json
import os
from pathlib import Path

from tracesel.cli import main

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def run_case(argv):
    buf = io.StringIO()
    cwd = os.getcwd()
    os.chdir(FIXTURES)
    try:
        with contextlib.redirect_stdout(buf):
            code = main(argv)
    finally:
        os.chdir(cwd)
    return code, buf.getvalue()


if __name__ == "__main__":
    cases = json.loads((FIXTURES / "golden" / "cases.json").read_text())
    for name, argv in cases.items():
        code, out = run_case(argv)
        if code != 0:
            raise SystemExit(f"{name}: exit code {code}")
        (FIXTURES / "golden" / f"{name}.json").write_text(out)
        print(f"wrote {name}.json")
