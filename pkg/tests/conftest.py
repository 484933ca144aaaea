import pytest

from hslab.hpop import classical_operator, pencil_operator, sandwich_operator
from hslab.properties import ReportCache
from hslab.realpoly import from_roots

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def legendre():
    return classical_operator([-1, 1], [1, 1])


@pytest.fixture(scope="session")
def heun():
    return classical_operator([0, 1, 2], [1, 1, 1])


@pytest.fixture(scope="session")
def heun_shifted():
    return classical_operator([0, 0.5, 3], [1, 2, 1])


@pytest.fixture(scope="session")
def sandwich():
    return sandwich_operator(from_roots([-2, -1, 0, 1]), 0, 2)


@pytest.fixture(scope="session")
def pencil():
    a = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    b = [[1, 0, 0], [0, 1, 0], [0, 0, 0]]
    c = [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    return pencil_operator(a, b, c)


@pytest.fixture(scope="session")
def caches(legendre, heun, sandwich):
    """One lazily filled report cache per test operator, shared across tests."""
    return {"legendre": ReportCache(legendre), "heun": ReportCache(heun), "sandwich": ReportCache(sandwich)}


@pytest.fixture
def acceptance_line():
    def record(number, title, ok, detail=""):
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}"
        if detail:
            line += f" ({detail})"
        print(line)
        _ACCEPTANCE_LINES.append(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
