import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_complex(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_antisymmetric(rng, n):
    A = random_complex(rng, n)
    return A - A.T


ACCEPTANCE_RESULTS = {}


def record_criterion(number, passed, detail):
    """Store and print one acceptance line; the summary repeats them in order."""
    line = f"CRITERION {number:>2}: {'PASS' if passed else 'FAIL'} | {detail}"
    ACCEPTANCE_RESULTS[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[n])
