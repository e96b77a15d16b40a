import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hitsrank import build_gamma_bar, gamma_from_hkn, pebble_run  # noqa: E402

ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def gamma_8_13_7():
    return gamma_from_hkn(8, 13, 7)


@pytest.fixture(scope="session")
def gamma_8_13_15():
    return gamma_from_hkn(8, 13, 15)


@pytest.fixture(scope="session")
def gamma_13_25_9():
    return gamma_from_hkn(13, 25, 9)


@pytest.fixture(scope="session")
def bar_3_3():
    return build_gamma_bar(3, 3)


@pytest.fixture(scope="session")
def trace_8_13_7(gamma_8_13_7):
    return pebble_run(gamma_8_13_7.graph, 400)


@pytest.fixture(scope="session")
def trace_8_13_15(gamma_8_13_15):
    return pebble_run(gamma_8_13_15.graph, 501)


@pytest.fixture(scope="session")
def trace_13_25_9(gamma_13_25_9):
    return pebble_run(gamma_13_25_9.graph, 501)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda c: (int(re.match(r"\d+", str(c)).group()), str(c))):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {str(key):>3}: {detail}")
