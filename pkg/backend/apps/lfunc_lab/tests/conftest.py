# lfunc_lab/tests/conftest.py
import os
import sys

import pytest

# tests import the package the same way main.py does
APP_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if APP_ROOT not in sys.path:
    sys.path.insert(0, APP_ROOT)

from app.arith_core import build_sieve  # noqa: E402
from app.characters import character_group  # noqa: E402
from app.display_utils import set_verbosity  # noqa: E402
from app.zero_library import ZeroLibrary  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def normal_verbosity():
    set_verbosity("normal")
    yield
    set_verbosity("normal")


@pytest.fixture(scope="session")
def small_table():
    return build_sieve(2, 10**5)


@pytest.fixture(scope="session")
def zero_library():
    """In-memory library shared by the whole run; zero scans are the slow part."""
    return ZeroLibrary(cache_path=None)


@pytest.fixture(scope="session")
def chi4():
    return character_group(4).nonprincipal()[0]


@pytest.fixture(scope="session")
def chi3():
    return character_group(3).nonprincipal()[0]
