import pytest

from sta_link.protocol import ProtocolConfig, run


@pytest.fixture(scope="session")
def lossless_result():
    return run(ProtocolConfig.paper_lossless())


@pytest.fixture(scope="session")
def stirap_result():
    return run(ProtocolConfig.sta_stirap_baseline(), store_trajectory=False)


@pytest.fixture(scope="session")
def dissipative_result():
    return run(ProtocolConfig.paper_dissipative(), store_trajectory=False)
