from itertools import product

import pytest

from src.core.errors import AnchorLimitExceeded, DomainError, FragmentViolation
from src.core.finite_set import EMPTY_SET, FiniteSetQ
from src.core.formula import Const, Language, Sort, TRUE, Var, constants, free_variables
from src.core.normal_form import MembershipPattern
from src.core.rational import Rational
from src.services.dlo_service import evaluate_qf
from src.services.wmso_service import (
    WmsoService, check_fragment, fresh_fillings, parameter_bound, realize_pattern, s_preimage, set_intersection, set_max, set_min,
    set_union,
)
from src.utils import corpus
from src.utils.formula_parser import parse_formula


def fs(*values) -> FiniteSetQ:
    return FiniteSetQ.of(Rational(v) for v in values)


def w(text: str):
    return parse_formula(text, Language.WMSO)


y, z = Var("y"), Var("z")
F = Var("F", Sort.SET)


def test_set_algebra():
    assert s_preimage(fs(1, 2, 3), fs(2, 3)) == fs(1, 2)
    assert s_preimage(fs(1, 2, 3), fs(1)) == EMPTY_SET
    assert set_union(fs(1), fs(2, 3)) == fs(1, 2, 3)
    assert set_intersection(fs(1, 2), fs(2, 3)) == fs(2)
    assert set_min(fs(3, 2)) == fs(2)
    assert set_max(fs(3, 2)) == fs(3)
    assert set_min(EMPTY_SET) == EMPTY_SET


def test_membership_in_literal(wmso):
    f = w("(exists-set S (and (in y S) (= S (set 1 1/2))))")
    assert wmso.eval_wformula(f, {y: Rational(1)})
    assert not wmso.eval_wformula(f, {y: Rational(2)})


def test_elements_are_positive(wmso):
    assert wmso.eliminate_w(w("(exists z (< z y))")) == TRUE
    assert wmso.eval_wformula(w("(exists z (< z 1))"), {})
    assert not wmso.eval_wformula(w("(forall z (< 1/2 z))"), {})


def test_set_quantifier_separates_elements(wmso):
    x = Var("x")
    f = w("(exists-set S (and (in y S) (not (in x S))))")
    result = wmso.eliminate_w(f)
    assert free_variables(result) == {x, y}
    assert evaluate_qf(result, {x: Rational(1), y: Rational(2)})
    assert not evaluate_qf(result, {x: Rational(1), y: Rational(1)})


def test_set_quantifier_moves_inside_element_quantifier(wmso):
    f = w("(exists-set S (exists z (and (in z S) (< 2 z))))")
    assert wmso.eval_wformula(f, {})
    assert wmso.vs_evaluate(f, {})


def test_free_set_is_instantiated(wmso):
    f = w("(exists z (and (in z F) (< 1 z)))")
    with pytest.raises(FragmentViolation):
        wmso.eliminate_w(f)
    check_fragment(f, parameters=[F])
    assert wmso.eval_wformula(f, {F: fs(1, 3)})
    assert not wmso.eval_wformula(f, {F: fs(1)})
    assert wmso.vs_evaluate(f, {F: fs(1, 3)})


def test_fragment_violation():
    with pytest.raises(FragmentViolation):
        check_fragment(w("(exists-set S (forall z (imp (in z S) (in z F))))"))
    check_fragment(w("(forall-set S (exists z (in z S)))"))


def test_set_quantifier_met_by_bound_elements(wmso):
    assert wmso.eliminate_w(w("(exists-set S (forall z (imp (in z S) (= z 1))))")) == TRUE
    assert not wmso.eval_wformula(w("(exists-set S (forall z (in z S)))"), {})
    assert wmso.eval_wformula(w("(forall-set S (exists z (not (in z S))))"), {})


def test_bound_set_below_a_free_element(wmso):
    # some finite set holds two points under y exactly when y is positive
    f = w("(exists-set S (exists z (exists u (and (in z S) (in u S) (< z u) (< u y)))))")
    result = wmso.eliminate_w(f)
    assert free_variables(result) <= {y}
    assert evaluate_qf(result, {y: Rational(1, 3)})
    assert wmso.vs_evaluate(f, {y: Rational(1, 3)})


def test_bound_set_bounded_by_a_literal(wmso):
    f = w("(exists-set S (and (in y S) (forall z (imp (in z S) (< z 2)))))")
    result = wmso.eliminate_w(f)
    assert evaluate_qf(result, {y: Rational(1)})
    assert not evaluate_qf(result, {y: Rational(3)})
    assert not evaluate_qf(result, {y: Rational(2)})


def test_set_equated_with_an_entangled_set(wmso):
    f = w("(exists-set S (exists-set T (and (= S T) (forall z (imp (in z T) (= z 5))) (exists z (in z T)))))")
    assert wmso.eliminate_w(f) == TRUE
    assert wmso.vs_evaluate(f, {})


def test_entangled_set_next_to_a_free_set(wmso):
    with pytest.raises(FragmentViolation):
        wmso.eliminate_w(w("(exists-set S (and (forall z (imp (in z S) (< z 2))) (set= S F)))"))


def test_fresh_fillings_cover_every_gap():
    fillings = fresh_fillings([Rational(1)], 2)
    assert () in fillings
    assert len(fillings) == 1 + 2 + 3
    assert (Rational(1, 3), Rational(2, 3)) in fillings
    assert (Rational(2), Rational(3)) in fillings
    assert all(p > 0 and p != 1 for filling in fillings for p in filling)


@pytest.mark.parametrize("count", [1, 2, 3, 4])
def test_patterns_over_anchors_are_exactly_the_realizable_ones(wmso, count):
    elements = [Var(f"e{i}") for i in range(count)]
    sets = [Var("S", Sort.SET), Var("T", Sort.SET)][: 2 if count <= 2 else 1]
    for values in product(range(1, count + 1), repeat=count):
        valued = {e: Rational(v) for e, v in zip(elements, values)}
        consistent = set(wmso.consistent_patterns(elements, sets, valued))
        assert len(consistent) == 2 ** (len(set(values)) * len(sets))
        for pattern in MembershipPattern.enumerate(elements, sets):
            if pattern not in consistent:
                with pytest.raises(DomainError):
                    realize_pattern(pattern, valued)
                continue
            realized = realize_pattern(pattern, valued)
            for i, e in enumerate(elements):
                for j, s in enumerate(sets):
                    assert (valued[e] in realized[s]) == pattern.bits[i][j]


def test_environment_is_checked(wmso):
    with pytest.raises(DomainError):
        wmso.eval_wformula(w("(< y 1)"), {y: Rational(-1)})
    with pytest.raises(DomainError):
        wmso.eval_wformula(w("(< y 1)"), {})


def test_anchor_limit():
    tight = WmsoService(anchor_limit=1)
    f = w("(exists-set S (and (in y S) (in 1 S) (not (in 2 S))))")
    with pytest.raises(AnchorLimitExceeded):
        tight.eliminate_w(f)


def test_parameter_bound():
    f = w("(exists-set S (and (in 3/2 S) (= S (set 1 2))))")
    assert parameter_bound(f) == {Rational(3, 2), Rational(1), Rational(2)}


def test_elimination_agrees_with_reference():
    wmso = WmsoService()
    for f, env in corpus.wmso_corpus(11, 60, depth=3):
        closed = wmso.instantiate(f, {v: env[v] for v in free_variables(f)})
        eliminated = wmso.eliminate_w(closed)
        assert evaluate_qf(eliminated, {}) == wmso.vs_evaluate(closed, {}), str(f)
        assert constants(eliminated) <= parameter_bound(closed)


def test_consistent_patterns_respect_equal_elements(wmso):
    S, T = Var("S", Sort.SET), Var("T", Sort.SET)
    one = Const(Rational(1))
    assert len(list(wmso.consistent_patterns([y, one], [S, T], {y: Rational(1)}))) == 4
    assert len(list(wmso.consistent_patterns([y, one], [S, T], {y: Rational(2)}))) == 16
    with pytest.raises(AnchorLimitExceeded):
        list(WmsoService(anchor_limit=1).consistent_patterns([y, one], [S], {y: Rational(2)}))


def test_realize_pattern():
    S = Var("S", Sort.SET)
    one = Const(Rational(1))
    pattern = MembershipPattern((y, one), (S,), ((True,), (False,)))
    assert realize_pattern(pattern, {y: Rational(3)}) == {S: fs(3)}
    with pytest.raises(DomainError):
        realize_pattern(pattern, {y: Rational(1)})
