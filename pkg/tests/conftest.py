import numpy as np
import pytest

from ymconc import backend
from ymconc.haar import RngStream


def pytest_report_header(config):
    return f"ymconc kernel backend: {backend()}"


@pytest.fixture
def stream():
    return RngStream(20261018, 0)


@pytest.fixture
def gen():
    return np.random.default_rng(1234)
