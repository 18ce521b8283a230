import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cpboot import TimeSeries  # noqa: E402


def make_series(y, t=None):
    y = np.asarray(y, float)
    t = np.arange(1, len(y) + 1, dtype=float) if t is None else np.asarray(t, float)
    return TimeSeries(t, y)


@pytest.fixture
def step10():
    return make_series([0.0] * 5 + [10.0] * 5)


@pytest.fixture
def write_csv_text(tmp_path):
    def _write(text, name="data.csv"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
