import os
from pathlib import Path

import pytest

from lieforge.ffield import ff_make

DATA = Path(__file__).resolve().parent.parent / "data"

os.environ.setdefault("LIEFORGE_SEED", "0")


@pytest.fixture(scope="session")
def gf2():
    return ff_make(2)


@pytest.fixture(scope="session")
def gf3():
    return ff_make(3)


@pytest.fixture(scope="session")
def gf4():
    return ff_make(2, 2)


@pytest.fixture(scope="session")
def gf9():
    return ff_make(3, 2)


@pytest.fixture(scope="session")
def data_dir():
    return DATA


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
