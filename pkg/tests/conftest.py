import sys

import numpy as np
import pytest

from coarray_esprit.array_model import reference_mra
from coarray_esprit.signal_sim import reference_scene


@pytest.fixture
def mra():
    return reference_mra()


@pytest.fixture
def scene():
    return reference_scene(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    report = getattr(mod, "REPORT", None)
    if not report:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(report):
        terminalreporter.write_line(report[key])
