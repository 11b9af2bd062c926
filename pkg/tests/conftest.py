import pytest

from fluidrank.catalog import Catalog
from fluidrank.perception import PerceptionProfile


@pytest.fixture(scope="session")
def catalog():
    return Catalog()


@pytest.fixture(scope="session")
def uniform_profile():
    return PerceptionProfile({"pressure": 1.0, "frequency": 1.0, "area": 1.0})


def pytest_addoption(parser):
    parser.addoption(
        "--skip-slow", action="store_true", default=False, help="skip long simulation tests"
    )


def pytest_collection_modifyitems(config, items):
    if not config.getoption("--skip-slow"):
        return
    marker = pytest.mark.skip(reason="--skip-slow given")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(marker)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running simulation tests")
