import pytest

from heptaca.engine import simulation_table
from heptaca.heptagrid import build_window
from heptaca import datafiles
from heptaca.table import load_table


@pytest.fixture(scope="session")
def w8():
    return build_window(8)


@pytest.fixture(scope="session")
def w4():
    return build_window(4)


@pytest.fixture(scope="session")
def published():
    return load_table(datafiles.table_path())


@pytest.fixture(scope="session")
def sim_table():
    return simulation_table()
