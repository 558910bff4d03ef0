import math

import pytest

from quenchtherm.state import RVector

SQ3 = math.sqrt(3.0)


def assert_r(r: RVector, expected, tol=1e-12):
    ex = expected.as_tuple() if isinstance(expected, RVector) else tuple(expected)
    assert r.as_tuple() == pytest.approx(ex, abs=tol)


def sds_pairs(max_index, canonical=False):
    for l in range(max_index + 1):
        for n in range(max_index + 1):
            if l == n or (canonical and l > n):
                continue
            yield l, n


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        ok, detail = mod.RESULTS[key]
        terminalreporter.write_line(f"criterion {key:<4} {'PASS' if ok else 'FAIL'}  {detail}")
