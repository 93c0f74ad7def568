import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import SortError
from src.core.formula import (
    And, Const, Eq, Exists, Forall, In, Lt, Sort, Var, free_variables, substitute,
)
from src.core.rational import Rational
from formula_strategies import ELEMENT_NAMES, order_a_formulas

x, y, z = Var("x"), Var("y"), Var("z")


def test_substitution_renames_capturing_binder():
    result = substitute(Exists(y, Lt(x, y)), {x: y})
    assert result.var != y
    assert result.body == Lt(y, result.var)
    assert free_variables(result) == {y}


def test_substitution_is_simultaneous():
    result = substitute(And((Lt(x, y), Eq(y, z))), {x: y, y: x})
    assert result == And((Lt(y, x), Eq(x, z)))


def test_bound_occurrences_are_untouched():
    f = Forall(x, Lt(x, y))
    assert substitute(f, {x: Const(Rational(1))}) == f


def test_substitution_keeps_sorts():
    S = Var("S", Sort.SET)
    with pytest.raises(SortError):
        substitute(In(z, S), {S: z})


@settings(max_examples=300)
@given(order_a_formulas(), st.sampled_from(ELEMENT_NAMES), st.sampled_from(ELEMENT_NAMES + ("1/2",)))
def test_free_variables_after_substitution(f, name, replacement):
    var = Var(name)
    term = Const(Rational(1, 2)) if replacement == "1/2" else Var(replacement)
    expected = set(free_variables(f)) - {var}
    if var in free_variables(f) and isinstance(term, Var):
        expected.add(term)
    assert free_variables(substitute(f, {var: term})) == expected
