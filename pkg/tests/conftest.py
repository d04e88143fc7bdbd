import numpy as np
import pytest

from factwords.sequences import SymbolSeq

ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Record one acceptance line: ``record(criterion, ok, detail)``.

    ``ok=None`` records a skipped criterion.
    """
    def _record(criterion, ok, detail):
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"[{status}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def seq(text):
    """Literal sequence with sorted-character ids (``"ab"`` -> [0, 1], D=2)."""
    return SymbolSeq.from_string(text)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
