import pytest

from voa.engine import Context
from voa.lab import attach_names
from voa.library import preset


@pytest.fixture(scope="session")
def n4():
    return attach_names(Context(preset("n4"), complete=False))


@pytest.fixture(scope="session")
def sl2():
    return attach_names(Context(preset("affine_sl2"), complete=False))
