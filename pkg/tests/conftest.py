import math

import numpy as np
import pytest
from scipy.special import lpmv


def reference_legendre(j, m, x):
    """Unit-normalized associated Legendre function from scipy's lpmv (independent of the
    package's recurrence).  The Condon-Shortley phase is removed to match the package."""
    m = abs(m)
    norm = math.sqrt((2 * j + 1) / 2 * math.factorial(j - m) / math.factorial(j + m))
    return (-1) ** m * norm * lpmv(m, j, x)


@pytest.fixture(scope="session")
def dense_rule():
    """High-order Gauss-Legendre rule from numpy, used as the independent quadrature oracle."""
    return np.polynomial.legendre.leggauss(120)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
