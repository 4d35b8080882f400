import mpmath
import numpy as np
import pytest

from oracles import constant_bits


@pytest.fixture(scope="session")
def e_bits():
    """One million bits of e, the standard SP 800-22 sample data."""
    return np.array(constant_bits(lambda: mpmath.e, 1_000_000), dtype=np.uint8)


_ACCEPTANCE = {}


@pytest.fixture
def verdict(request):
    """Record and print one acceptance line; returns a callable(number, ok, detail)."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
