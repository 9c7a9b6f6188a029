import numpy as np
import pytest


def random_psd(n, rng):
    b = rng.standard_normal((n, n))
    a = b @ b.T
    return (a + a.T) / 2


def random_symmetric(n, rng):
    b = rng.standard_normal((n, n))
    return b + b.T


def random_graph_dense(v, prob, rng):
    upper = np.triu(rng.random((v, v)) < prob, 1)
    return (upper | upper.T).astype(np.int64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_CRITERIA: dict = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion for the terminal summary."""
    name = request.node.name
    _CRITERIA[name] = "FAIL"

    def passed(detail=""):
        _CRITERIA[name] = f"PASS {detail}".rstrip()

    yield passed
    if _CRITERIA[name] == "FAIL":
        print(f"[acceptance] {name}: FAIL")
    else:
        print(f"[acceptance] {name}: {_CRITERIA[name]}")


def pytest_runtest_makereport(item, call):
    if call.when == "call" and item.name in _CRITERIA and call.excinfo is not None:
        if call.excinfo.errisinstance(pytest.skip.Exception):
            _CRITERIA[item.name] = "SKIP"
        else:
            _CRITERIA[item.name] = f"FAIL {call.excinfo.exconly().splitlines()[0][:160]}"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _CRITERIA.items():
        terminalreporter.write_line(f"{name}: {status}")
