import pytest

from src.core.formula import Var
from src.services.coding_service import CodingService
from src.services.interior_service import InteriorService
from src.services.rnf_service import RnfService
from src.services.wmso_service import WmsoService


@pytest.fixture
def coding():
    return CodingService()


@pytest.fixture
def wmso():
    return WmsoService()


@pytest.fixture
def rnf(coding, wmso):
    return RnfService(coding, wmso)


@pytest.fixture
def interior(coding, wmso, rnf):
    return InteriorService(coding, wmso, rnf, certificate_depth=6)


@pytest.fixture
def x():
    return Var("x")


@pytest.fixture
def y():
    return Var("y")
