from src.core.cell import IntervalPart, IntervalUnion
from src.core.finite_set import FiniteSetQ
from src.core.formula import A, Const, Exists, Guard, In, Lt, Not, SetLit, Sort, Var, conj
from src.core.normal_form import RelativeNormalForm, Sign, SignStratum
from src.core.rational import Rational
from src.utils.formatters import format_rnf, format_set, format_verdict, interval_union_records, print_formula

x, y = Var("x"), Var("y")


def test_print_formula():
    f = Exists(y, conj(A(x, y), Not(Lt(y, Const(Rational(1, 2))))), Guard.POS)
    assert print_formula(f) == "(exists-pos y (and (A x y) (not (< y 1/2))))"
    s = Var("S", Sort.SET)
    assert print_formula(In(y, SetLit(FiniteSetQ.of([Rational(2), Rational(1)])))) == "(in y (set 1 2))"
    assert print_formula(Exists(s, In(y, s))) == "(exists-set S (in y S))"


def test_format_set():
    assert format_set(FiniteSetQ.of([Rational(1), Rational(1, 2)])) == "{1/2, 1}"
    assert format_set(FiniteSetQ()) == "{}"


def test_interval_union_records():
    union = IntervalUnion.normalize([IntervalPart.interval(None, Rational(3)), IntervalPart.point(Rational(5))])
    assert interval_union_records(union) == [
        {"kind": "interval", "endpoints": ["-inf", "3"]},
        {"kind": "point", "endpoints": ["5"]},
    ]


def test_format_rnf_and_verdict():
    empty = RelativeNormalForm(SignStratum.of({x: Sign.POS}), ())
    assert format_rnf(empty) == "stratum: x>0\n  false"
    assert format_verdict(True, "open") == "✅ open"
    assert format_verdict(False, "not open") == "❌ not open"
