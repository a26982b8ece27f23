import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

# block-structured matrix with a transient product feeding the first SCC
DELTA_COMBINED = np.array([
    [0.6, 0.4, 0.0, 0.0],
    [0.3, 0.7, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.8, 0.0, 0.2],
])
DELTA_STRONG = np.array([[0.6, 0.4], [0.3, 0.7]])
DELTA_BLOCKS = np.array([
    [0.6, 0.4, 0.0, 0.0],
    [0.3, 0.7, 0.0, 0.0],
    [0.0, 0.0, 0.5, 0.5],
    [0.0, 0.0, 0.1, 0.9],
])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for name, mod in list(sys.modules.items()):
        if name.rsplit(".", 1)[-1] == "test_acceptance" and hasattr(mod, "RESULTS"):
            lines = mod.RESULTS
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
