import json

import pytest

from main import main
from src.handlers.command_handler import EXIT_DOMAIN, EXIT_FRAGMENT, EXIT_OK, EXIT_USAGE, CommandHandler
from src.utils.schemas import RunConfig


@pytest.fixture
def handler():
    return CommandHandler(RunConfig(depth=4))


def test_rho(handler):
    outcome = handler.run("rho", {"value": "-1/2"})
    assert outcome.status == EXIT_OK
    assert outcome.text == "{1}"
    assert outcome.record.result == ["1"]
    assert outcome.record.evidence == {"index": 1}


def test_fiber_of_nonnegative_is_empty(handler):
    assert handler.run("fiber", {"value": "3"}).text == "{}"


def test_witness(handler):
    outcome = handler.run("witness", {"bound": 3})
    assert outcome.text == "-1/32768 fiber_size=4"
    assert outcome.record.result["exponent"] == 15


def test_qe(handler):
    outcome = handler.run("qe", {"formula": "(exists z (and (< x z) (< z y)))"})
    assert outcome.status == EXIT_OK
    assert outcome.record.evidence["cell_check"] is True


def test_qe_of_weak_monadic_formula(handler):
    outcome = handler.run("qe", {
        "formula": "(exists-set S (forall z (imp (in z S) (= z 1))))",
        "language": "wmso",
    })
    assert outcome.status == EXIT_OK
    assert outcome.text == "true"
    assert outcome.record.evidence["parameters_in_E"] is True


def test_eval_negative_quantifier_over_fibers(handler):
    outcome = handler.run("eval", {"formula": "(forall-neg t (exists-pos y (not (A t y))))"})
    assert outcome.status == EXIT_OK
    assert outcome.record.result is True and outcome.record.evidence["reference"] is True


def test_cells_of_unary_formula(handler):
    outcome = handler.run("cells", {"formula": "(or (< x 3) (= x 5))"})
    assert outcome.text.splitlines()[-1] == "= (-inf, 3) ∪ {5}"
    assert outcome.record.evidence["total_cells"] == 5


def test_eval_both_languages(handler):
    outcome = handler.run("eval", {"formula": "(A x y)", "assignments": ["x=-1/8", "y=1/2"]})
    assert outcome.record.result is True and outcome.record.evidence["reference"] is True
    outcome = handler.run("eval", {
        "formula": "(exists z (and (in z F) (< 1 z)))",
        "assignments": ["F={1, 3}"],
        "language": "wmso",
    })
    assert outcome.status == EXIT_OK and outcome.record.result is True


def test_omin_reports_fiber(handler):
    outcome = handler.run("omin", {"formula": "(A -1/2 y)"})
    assert outcome.status == EXIT_OK
    assert outcome.record.result["is_open"] is False
    assert outcome.record.result["fibers"] == {"-1/2": ["1"]}


def test_nonelem_table(handler):
    outcome = handler.run("nonelem", {"bound": 2, "table": True})
    assert [r["complement_components"] for r in outcome.record.result] == [2, 3, 4]


@pytest.mark.parametrize("command, args, status", [
    ("rho", {"value": "0"}, EXIT_DOMAIN),
    ("rho", {"value": "half"}, EXIT_DOMAIN),
    ("witness", {"bound": -1}, EXIT_USAGE),
    ("eval", {"formula": "(< x 1)", "assignments": ["x"]}, EXIT_USAGE),
    ("qe", {"formula": "(exists z (and (in z F) (< 1 z)))", "language": "wmso"}, EXIT_FRAGMENT),
    ("interior", {"formula": "(A x y)", "method": "guess"}, EXIT_DOMAIN),
    ("frobnicate", {}, EXIT_USAGE),
])
def test_exit_statuses(handler, command, args, status):
    outcome = handler.run(command, args)
    assert outcome.status == status
    assert outcome.record.result is None and "error" in outcome.record.evidence


def test_main_structured_output(capsys):
    assert main(["--format", "structured", "rho", "-1/8"]) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record["schema_version"] == 1
    assert record["command"] == "rho"
    assert record["result"] == ["1/2", "1"]


def test_main_usage_errors(capsys):
    assert main(["witness"]) == EXIT_USAGE
    assert main(["--depth", "-3", "rho", "-1"]) == EXIT_USAGE
    assert "usage error" in capsys.readouterr().err
