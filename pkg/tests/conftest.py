"""Shared fixtures: the two reference channels and the cap-power SNR."""

import pytest

from uavlink import load_fixture
from uavlink.scenario import average_snr_db


@pytest.fixture(scope="session")
def case1():
    return load_fixture("case1")


@pytest.fixture(scope="session")
def case2():
    return load_fixture("case2")


@pytest.fixture(scope="session")
def gamma_max(case1):
    """Linear SNR at the 35 dBm power cap (same link budget in both cases)."""
    db = average_snr_db(case1.scenario.p_max_dbm, case1.scenario)
    return 10.0 ** (db / 10.0)
