from fractions import Fraction

import pytest
from hypothesis import strategies as st


def rationals(lo=-9, hi=9, max_den=6):
    return st.builds(Fraction, st.integers(lo, hi), st.integers(1, max_den))


def nonzero_rationals(lo=-9, hi=9, max_den=6):
    return rationals(lo, hi, max_den).filter(bool)


def cofactor_det(m):
    """Laplace expansion along the first row; the independent oracle for det."""
    n = len(m)
    if n == 0:
        return 1
    total = 0
    for c in range(n):
        minor = [row[:c] + row[c + 1:] for row in m[1:]]
        total += (-1) ** c * m[0][c] * cofactor_det(minor)
    return total


@pytest.fixture
def F():
    return Fraction


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
