import pytest

from src.core.errors import FragmentViolation
from src.services.acceptance_service import AcceptanceSuite, _sized
from src.utils.schemas import RunConfig


@pytest.fixture
def suite():
    return AcceptanceSuite(RunConfig(depth=4), scale=0.02)


@pytest.mark.parametrize("check", ["cell_count", "set_algebra", "nonelementarity", "fiber_bounds", "coding_density"])
def test_check_passes(suite, check):
    cases, failures, _ = getattr(suite, check)()
    assert cases > 0 and failures == 0


def test_order_elimination_small(suite):
    cases, failures, _ = suite.order_elimination()
    assert cases > 0 and failures == 0


@pytest.mark.parametrize("check", ["wmso_agreement", "normal_form_soundness"])
def test_differential_checks_small(suite, check):
    cases, failures, detail = getattr(suite, check)()
    assert cases > 0 and failures == 0
    assert detail == "0 formulas left undecided"


def test_undecided_formulas_fail_the_check(suite, monkeypatch):
    def undecided(f):
        raise FragmentViolation("not decided", str(f))

    monkeypatch.setattr(suite.wmso, "eliminate_w", undecided)
    cases, failures, _ = suite.wmso_agreement()
    assert failures == cases > 0


def test_sized_never_drops_to_zero():
    assert _sized(500, 0.0) == 1
    assert _sized(500, 0.5) == 250
