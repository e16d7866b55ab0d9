import re
from collections import defaultdict

import pytest

CRITERIA = {
    1: "sextic dual spectra",
    2: "upside-down quartic and its WKB levels",
    3: "shifted oscillator",
    4: "WKB closed forms and numeric quantization",
    5: "eps sweep",
    6: "isospectral pairs",
    7: "binding energies",
    8: "classical periods",
    9: "tunneling resonances",
    10: "region hopping",
    11: "two-level matrix identities",
    12: "operator algebra",
    13: "spectral zeta",
    14: "quasi-exactly solvable levels",
    15: "property suites",
}

_outcomes = defaultdict(list)
_NAME = re.compile(r"test_acceptance\.py::test_c(\d\d)_")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        kind = "xfailed" if hasattr(report, "wasxfail") else report.outcome
        if report.when == "call" and kind == "passed" and hasattr(report, "wasxfail"):
            kind = "xpassed"
        _outcomes[int(m.group(1))].append((report.nodeid.split("::")[-1], kind))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, desc in CRITERIA.items():
        res = _outcomes.get(n)
        if not res:
            tr.write_line(f"NOT RUN  criterion {n:2d}: {desc}")
            continue
        ok = all(kind == "passed" for _, kind in res)
        line = f"{'PASS' if ok else 'FAIL'}     criterion {n:2d}: {desc}"
        xf = [name for name, kind in res if kind == "xfailed"]
        bad = [name for name, kind in res if kind not in ("passed", "xfailed")]
        if xf:
            line += f"  [expected failure: {', '.join(xf)}]"
        if bad:
            line += f"  [failed: {', '.join(bad)}]"
        tr.write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240601)
