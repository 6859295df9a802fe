import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

DATA_DIR = Path(__file__).parent / "data"
# Point this at another directory of 8-bit X-rays to run the dataset checks on it.
XRAY_DIR = Path(os.environ.get("XRENHANCE_XRAY_DIR", DATA_DIR / "xray"))

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Filled by tests/test_acceptance.py: criterion number -> (passed, label, detail)
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def step_image():
    img = np.zeros((32, 32), dtype=np.uint8)
    img[:, 16:] = 200
    return img


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, label, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {label} | {detail}")
