import pytest

from wcka.laws import default_alphabet
from wcka.terms import compile, load_alphabet, parse

CRITERIA = {
    1: "axiom suite",
    2: "vending machine",
    3: "simulation asymmetries",
    4: "may testing vs trace inclusion",
    5: "tree oracle vs leq",
    6: "probabilistic bridge",
    7: "Rabin case study",
    8: "well-formedness closure",
}

_results: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        _results[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, name in CRITERIA.items():
        if n in _results:
            passed, detail = _results[n]
            terminalreporter.write_line(f"criterion {n} ({name}): {'PASS' if passed else 'FAIL'} - {detail}")
        else:
            terminalreporter.write_line(f"criterion {n} ({name}): NOT RUN")


@pytest.fixture(scope="session")
def A():
    """external a, b, c; internal t; flip with guards h, g; frame {a, b, c}"""
    return default_alphabet()


@pytest.fixture(scope="session")
def AB():
    """external a, b; internal t; frame {a, b}"""
    return load_alphabet("external a, b; internal t; sync {a, b};")


@pytest.fixture
def c(A):
    return lambda text: compile(parse(text, A), A)
