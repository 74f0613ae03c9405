from pathlib import Path

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cap_text():
    """Synthetic 16x50 file in the OR-Library capacitated warehouse layout."""
    return (Path(__file__).parent / "data" / "cap_style_16x50.txt").read_text()


def pytest_terminal_summary(terminalreporter):
    from tests.helpers import ACCEPTANCE_RESULTS

    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
