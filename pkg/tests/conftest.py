from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def rand_matrix(rng, d, hermitian=False):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2 if hermitian else g


# -- acceptance bookkeeping: one PASS/FAIL line per criterion ----------------------
_CRITERIA: dict[str, tuple[str, float, str]] = {}


@pytest.fixture
def criterion(request):
    """Record ``(name, detail)`` for the acceptance summary; the outcome is
    taken from the test result."""
    import time

    record = {"name": request.node.name, "detail": ""}
    start = time.perf_counter()
    yield record
    _CRITERIA[request.node.nodeid] = (record["name"], time.perf_counter() - start, record["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and "criterion" in item.fixturenames:
        _OUTCOMES[item.nodeid] = rep.passed


_OUTCOMES: dict[str, bool] = {}


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (name, elapsed, detail) in _CRITERIA.items():
        status = "PASS" if _OUTCOMES.get(nodeid, False) else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({elapsed:.2f} s)  {detail}")
