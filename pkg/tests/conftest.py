import numpy as np
import pytest
from hypothesis import strategies as st


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def rates(max_norm=4 * np.pi):
    comp = st.floats(-max_norm / np.sqrt(3), max_norm / np.sqrt(3), allow_nan=False)
    return st.tuples(comp, comp, comp).map(np.array)


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
