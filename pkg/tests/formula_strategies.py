from hypothesis import strategies as st

from src.core.finite_set import FiniteSetQ
from src.core.formula import (
    FALSE, TRUE, A, And, Const, Eq, Exists, Forall, Guard, Imp, In, Lt, Not, Or, SetLit, Sort, Var,
)
from src.core.rational import Rational

ELEMENT_NAMES = ("x", "y", "z", "u", "v")
SET_NAMES = ("S", "T", "F")

rationals = st.builds(Rational, st.integers(-6, 6), st.integers(1, 4))
positive_rationals = st.builds(Rational, st.integers(1, 6), st.integers(1, 3))
set_literals = st.builds(lambda values: SetLit(FiniteSetQ.of(values)), st.lists(positive_rationals, max_size=3))


@st.composite
def order_a_formulas(draw, depth: int = 3, bound: tuple = ()):
    """Order formulas with A over a small pool of names; binders never shadow"""
    terms = st.one_of(st.sampled_from(ELEMENT_NAMES).map(Var), rationals.map(Const))
    if depth <= 0 or draw(st.integers(0, 3)) == 0:
        kind = draw(st.sampled_from([Lt, Eq, A, None]))
        if kind is None:
            return draw(st.sampled_from([TRUE, FALSE]))
        return kind(draw(terms), draw(terms))
    roll = draw(st.integers(0, 4))
    if roll == 0:
        return Not(draw(order_a_formulas(depth - 1, bound)))
    if roll in (1, 2):
        kind = draw(st.sampled_from([And, Or, Imp]))
        left, right = draw(order_a_formulas(depth - 1, bound)), draw(order_a_formulas(depth - 1, bound))
        return Imp(left, right) if kind is Imp else kind((left, right))
    free = [n for n in ELEMENT_NAMES if n not in bound]
    if not free:
        return draw(order_a_formulas(0, bound))
    name = draw(st.sampled_from(free))
    kind = draw(st.sampled_from([Exists, Forall]))
    guard = draw(st.sampled_from([None, Guard.NEG, Guard.POS]))
    return kind(Var(name), draw(order_a_formulas(depth - 1, bound + (name,))), guard)


@st.composite
def wmso_formulas(draw, depth: int = 3, bound: tuple = ()):
    """Weak monadic formulas with positive literals; element and set names never overlap"""
    elements = st.one_of(st.sampled_from(ELEMENT_NAMES[:3]).map(Var), positive_rationals.map(Const))
    set_vars = st.sampled_from(SET_NAMES).map(lambda n: Var(n, Sort.SET))
    sets = st.one_of(set_vars, set_literals)
    if depth <= 0 or draw(st.integers(0, 3)) == 0:
        roll = draw(st.integers(0, 3))
        if roll == 0:
            return In(draw(elements), draw(sets))
        if roll == 1:
            return Eq(draw(set_vars), draw(sets))
        return draw(st.sampled_from([Lt, Eq]))(draw(elements), draw(elements))
    roll = draw(st.integers(0, 4))
    if roll == 0:
        return Not(draw(wmso_formulas(depth - 1, bound)))
    if roll in (1, 2):
        kind = draw(st.sampled_from([And, Or]))
        return kind((draw(wmso_formulas(depth - 1, bound)), draw(wmso_formulas(depth - 1, bound))))
    sort = draw(st.sampled_from([Sort.ELEM, Sort.SET]))
    pool = ELEMENT_NAMES[:3] if sort == Sort.ELEM else SET_NAMES
    free = [n for n in pool if n not in bound]
    if not free:
        return draw(wmso_formulas(0, bound))
    name = draw(st.sampled_from(free))
    kind = draw(st.sampled_from([Exists, Forall]))
    return kind(Var(name, sort), draw(wmso_formulas(depth - 1, bound + (name,))))
