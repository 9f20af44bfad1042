import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from escprob.mpfloat import set_sign_hook  # noqa: E402

MIXED_SIGN_ADDS = []


def _panic(a, b):
    MIXED_SIGN_ADDS.append((a, b))
    raise AssertionError(f"mixed-sign add reached mp_add: {a!r} + {b!r}")


@pytest.fixture(autouse=True, scope="session")
def panicking_sign_hook():
    """Any mixed-sign add anywhere in the suite fails loudly.

    Tests that provoke the error on purpose wrap the call in ``sign_hook(None)``.
    """
    old = set_sign_hook(_panic)
    yield
    set_sign_hook(old)


_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        key = int(name.split("_")[2])
        ok = report.outcome == "passed" and _criteria.get(key, (True,))[0]
        _criteria[key] = (ok, name, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        ok, name, secs = _criteria[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {name}  ({secs:.1f}s)")
