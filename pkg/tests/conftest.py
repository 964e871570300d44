from pathlib import Path

import numpy as np
import pytest

from kerneltv import Image

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def gray_small(rng):
    """Smooth ramp plus texture, 16x16, strictly inside (0, 1)."""
    y, x = np.mgrid[0:16, 0:16]
    base = 0.2 + 0.6 * x / 15.0
    return Image(np.clip(base + 0.05 * rng.standard_normal((16, 16)), 0.01, 0.99))


@pytest.fixture
def color_small(rng):
    return Image(rng.uniform(0.05, 0.95, size=(12, 12, 3)))


@pytest.fixture
def data_dir():
    return DATA


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    def record(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} -- {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
