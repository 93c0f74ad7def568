import pytest

from src.core.errors import DomainError
from src.core.finite_set import EMPTY_SET, FiniteSetQ
from src.core.formula import A, Const, Eq, FALSE, Guard, In, Lt, Not, SetLit, TRUE, Var, ZERO, conj, disj, walk
from src.core.normal_form import Sign, SignStratum
from src.core.rational import Rational
from src.services.dlo_service import cell_of_point, enumerate_cells, equivalent_on_cells, evaluate_order, evaluate_qf
from src.services.interior_service import lower_variable, upper_variable
from src.services.rnf_service import set_variable


def q(num, den=1) -> Rational:
    return Rational(num, den)


def c(value) -> Const:
    return Const(q(value) if not isinstance(value, Rational) else value)


@pytest.mark.parametrize("method", ["cells", "qe"])
def test_interior_of_A_is_empty(interior, x, y, method):
    result = interior.interior_formula(A(x, y), method=method)
    assert not any(isinstance(node, A) for node in walk(result))
    assert equivalent_on_cells(result, FALSE, [x, y])


@pytest.mark.parametrize("method", ["cells", "qe"])
def test_interior_of_complement(interior, x, y, method):
    result = interior.interior_formula(Not(A(x, y)), method=method)
    assert equivalent_on_cells(result, disj(Lt(ZERO, x), Lt(y, ZERO)), [x, y])


def test_interior_of_pure_order_set(interior, x):
    f = Lt(x, c(-1))
    assert equivalent_on_cells(interior.interior_formula(f), f, [x])


def test_unknown_method(interior, x, y):
    with pytest.raises(DomainError):
        interior.interior_formula(A(x, y), method="guess")


@pytest.mark.parametrize("point, expected", [
    ((q(1), q(1)), True),
    ((q(-1), q(-1)), True),
    ((q(-1, 2), q(2)), False),
    ((q(-1, 2), q(1, 3)), False),
    ((q(0), q(-1)), True),
    ((q(0), q(1)), False),
])
def test_is_interior_point(interior, x, y, point, expected):
    assert interior.is_interior_point(Not(A(x, y)), {x: point[0], y: point[1]}) is expected


def test_non_interior_certificate(interior, coding, x, y):
    center = {x: q(-1, 2), y: q(2)}
    certificate = interior.non_interior_certificate(Not(A(x, y)), center, depth=4)
    assert certificate.found and certificate.failed_at is None
    assert [k for k, _, _ in certificate.witnesses] == [1, 2, 3, 4]
    for k, point, labels in certificate.witnesses:
        radius = q(1, 2 ** k)
        assert abs(point[x] - center[x]) < radius and abs(point[y] - center[y]) < radius
        fiber = labels.get(x, coding.fiber(point[x]))
        assert point[x] < 0 < point[y] and point[y] in fiber


def test_certificate_fails_inside(interior, x, y):
    certificate = interior.non_interior_certificate(Not(A(x, y)), {x: q(1), y: q(1)}, depth=3)
    assert not certificate.found and certificate.failed_at == 1


def test_open_set_formula(interior, x, y):
    f = conj(Lt(x, c(-1)), Lt(ZERO, y))
    assert equivalent_on_cells(interior.open_set_formula(f), f, [x, y])
    with pytest.raises(DomainError):
        interior.open_set_formula(Not(A(x, y)))


def test_openness_witness(interior, x, y):
    assert interior.openness_witness(Lt(x, y)) is None
    witness = interior.openness_witness(Not(A(x, y)))
    assert witness is not None and not interior.is_interior_point(Not(A(x, y)), witness)


def test_label_pool(interior, x, y):
    pool = interior.label_pool(A(c(q(-1, 8)), y), [q(3)])
    assert pool[0] == EMPTY_SET
    assert FiniteSetQ.of([q(3)]) in pool
    assert FiniteSetQ.of([q(1), q(1, 2)]) in pool


def test_singleton_fiber_is_not_open(interior, y):
    report = interior.open_core_check(A(c(q(-1, 2)), y))
    assert not report.is_open
    assert report.witness == q(1)
    assert report.description.is_empty()
    assert report.fibers == {q(-1, 2): FiniteSetQ.of([q(1)])}
    assert report.certificate is not None and report.certificate.found


def test_complement_of_fiber_is_open(interior, y):
    report = interior.open_core_check(Not(A(c(q(-1, 2)), y)))
    assert report.is_open and report.witness is None
    assert str(report.description) == "(-inf, 1) ∪ (1, +inf)"


def test_open_core_needs_one_variable(interior, x, y):
    with pytest.raises(DomainError):
        interior.open_core_check(Lt(x, y))


@pytest.mark.parametrize("bound, size", [(0, 1), (3, 4), (31, 32)])
def test_nonelementarity_report(interior, bound, size):
    report = interior.nonelementarity_report(bound)
    assert report.fiber_size == size > bound
    assert report.complement_components == size + 1
    assert not any(report.complement.contains(p) for p in report.fiber)


def test_finite_satisfiability_table(interior):
    table = interior.finite_satisfiability_table(5)
    assert [r.bound for r in table] == list(range(6))
    assert all(r.fiber_size == r.bound + 1 for r in table)


def test_comp_formula(interior):
    x1, x2 = Var("x1"), Var("x2")
    equal = cell_of_point([q(-1), q(-1)])
    assert interior.comp_formula(equal) == Eq(set_variable(x1), set_variable(x2))
    assert interior.comp_formula(cell_of_point([q(-2), q(-1)])) == TRUE
    pinned = cell_of_point([q(-1, 2)], [q(-1, 2)])
    assert interior.comp_formula(pinned) == Eq(set_variable(x1), SetLit(FiniteSetQ.of([q(1)])))


def test_meet_formula(interior):
    x1, x2 = Var("x1"), Var("x2")
    meet = interior.meet_formula(cell_of_point([q(-2), q(-1)]))

    def box(l1, u1, l2, u2):
        return {lower_variable(x1): l1, upper_variable(x1): u1, lower_variable(x2): l2, upper_variable(x2): u2}

    assert evaluate_order(meet, box(q(-1), q(-1, 2), q(-3, 4), q(-1, 4)))
    assert not evaluate_order(meet, box(q(-1, 2), q(-1, 4), q(-1), q(-3, 4)))


def test_gamma_formula(interior, x, y):
    cell = enumerate_cells([x], [], Guard.NEG)[0]
    label = set_variable(x)
    bounds = {y: (q(1), q(2))}
    assert interior.gamma_formula(cell, TRUE, [y]) == TRUE
    member = In(y, label)
    assert not evaluate_qf(interior.gamma_formula(cell, member, [y], bounds=bounds), {})
    assert not evaluate_qf(interior.gamma_formula(cell, Not(member), [y], bounds=bounds), {})
    symbolic = interior.gamma_formula(cell, member, [y])
    assert not evaluate_qf(symbolic, {lower_variable(y): q(1), upper_variable(y): q(2)})


def test_refine_to_cells(interior, rnf, x, y):
    form = rnf.to_rnf(A(x, y), SignStratum.of({x: Sign.NEG, y: Sign.POS}))
    refined = interior.refine_to_cells(form)
    assert len(refined) == 1


def test_box_subset_formula(interior, rnf, x, y):
    coded = rnf.to_rnf(A(x, y), SignStratum.of({x: Sign.NEG, y: Sign.POS}))
    env = {lower_variable(x): q(-1), upper_variable(x): q(-1, 2), lower_variable(y): q(1), upper_variable(y): q(2)}
    assert not evaluate_order(interior.box_subset_formula(coded), env)

    below = rnf.to_rnf(Lt(x, c(-1)), SignStratum.of({x: Sign.NEG}))
    condition = interior.box_subset_formula(below)
    assert evaluate_order(condition, {lower_variable(x): q(-3), upper_variable(x): q(-2)})
    assert not evaluate_order(condition, {lower_variable(x): q(-3, 2), upper_variable(x): q(-1, 2)})


@pytest.mark.parametrize("make", [
    lambda x, y: A(x, y),
    lambda x, y: Not(A(x, y)),
    lambda x, y: disj(A(x, y), Lt(x, c(-1))),
    lambda x, y: conj(Not(A(x, y)), Lt(ZERO, y)),
])
def test_interior_is_idempotent(interior, x, y, make):
    once = interior.interior_formula(make(x, y))
    twice = interior.interior_formula(once)
    assert equivalent_on_cells(twice, once, [x, y])


@pytest.mark.parametrize("make_smaller, make_larger", [
    (lambda x, y: A(x, y), lambda x, y: disj(A(x, y), Lt(x, c(-1)))),
    (lambda x, y: conj(Not(A(x, y)), Lt(ZERO, x)), lambda x, y: Not(A(x, y))),
    (lambda x, y: Lt(x, c(-1)), lambda x, y: disj(Lt(x, c(-1)), A(x, y))),
])
def test_interior_is_monotone(interior, x, y, make_smaller, make_larger):
    smaller = interior.interior_formula(make_smaller(x, y))
    larger = interior.interior_formula(make_larger(x, y))
    assert equivalent_on_cells(conj(smaller, larger), smaller, [x, y])
