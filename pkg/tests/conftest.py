from importlib import resources
from pathlib import Path

import pytest

from eqspectre.lts import read_aut

DATA = Path(str(resources.files("eqspectre") / "data"))


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def fig3():
    return read_aut(DATA / "fig3.aut")
