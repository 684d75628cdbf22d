import numpy as np
import pytest

from aqc.codebook import Matching, reference_codebook, validate_codebook


@pytest.fixture
def square():
    """N=2 codebook {(1,2),(3,4)} / {(1,3),(2,4)}: one 4-cycle."""
    return validate_codebook(Matching.from_pairs([(1, 2), (3, 4)]),
                             Matching.from_pairs([(1, 3), (2, 4)]))


@pytest.fixture
def reference():
    return reference_codebook()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; printed in the terminal summary."""
    def record(number, title, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: "
                                f"{title}" + (f" ({detail})" if detail else ""))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
