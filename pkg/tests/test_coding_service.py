import pytest
from hypothesis import given, settings, strategies as st

from src.core.box import Box
from src.core.errors import DomainError
from src.core.finite_set import EMPTY_SET, FiniteSetQ
from src.core.rational import Rational
from src.services.coding_service import CodingService, PowerCode
from src.services.dlo_service import cell_of_point


def q(num, den=1) -> Rational:
    return Rational(num, den)


def test_enumeration_prefix(coding):
    prefix = [coding.enum_positive_rational(i) for i in range(8)]
    assert prefix == [q(1), q(1, 2), q(2), q(1, 3), q(3, 2), q(2, 3), q(3), q(1, 4)]


@settings(max_examples=200)
@given(st.integers(0, 5000))
def test_index_of_inverts_enumeration(i):
    coding = CodingService()
    assert coding.index_of(coding.enum_positive_rational(i)) == i


def test_index_of_rejects_nonpositive(coding):
    with pytest.raises(DomainError):
        coding.index_of(q(0))


def test_index_search_limit():
    with pytest.raises(DomainError):
        CodingService(index_limit=100).index_of(q(1, 200))


@pytest.mark.parametrize("x, expected", [
    (q(-1, 2), [q(1)]),
    (q(-1, 8), [q(1), q(1, 2)]),
    (q(-3, 4), [q(1, 2)]),
    (q(-1), []),
    (q(-5, 3), []),
])
def test_rho(coding, x, expected):
    assert coding.rho(x) == FiniteSetQ.of(expected)


@pytest.mark.parametrize("x", [q(0), q(1, 2)])
def test_rho_outside_negatives(coding, x):
    with pytest.raises(DomainError):
        coding.rho(x)
    assert coding.fiber(x) == EMPTY_SET


def test_eval_A(coding):
    assert coding.eval_A(q(-1, 2), q(1))
    assert not coding.eval_A(q(-1, 2), q(1, 2))
    assert not coding.eval_A(q(1, 2), q(1))
    assert not coding.eval_A(q(-1, 8), q(-1))


def test_set_index_round_trip(coding):
    values = FiniteSetQ.of([q(1), q(3, 2), q(1, 4)])
    assert coding.set_of_index(coding.index_of_set(values)) == values
    assert coding.index_of_set(EMPTY_SET) == 0


@settings(max_examples=150)
@given(
    st.integers(0, 40),
    st.integers(0, 10 ** 4),
    st.integers(1, 10 ** 6),
)
def test_codes_are_dense(n, offset, width):
    coding = CodingService()
    b = -q(offset, 100)
    a = b - q(width, 10 ** 6)
    x = coding.find_code_in_interval(n, a, b)
    assert a < x < b
    assert coding.rho(x) == coding.set_of_index(n)


def test_find_code_rejects_bad_intervals(coding):
    with pytest.raises(DomainError):
        coding.find_code_in_interval(1, q(-1), q(1))
    with pytest.raises(DomainError):
        coding.find_code_in_interval(1, q(-1), q(-2))


def test_find_labelled(coding):
    label = FiniteSetQ.of([q(2), q(1, 3)])
    x = coding.find_labelled(label, q(-1, 1000), q(0))
    assert -q(1, 1000) < x < 0 and coding.rho(x) == label


def test_same_fiber(coding):
    assert coding.same_fiber(q(-1, 2), q(-3, 2))
    assert not coding.same_fiber(q(-1, 2), q(-1, 4))
    with pytest.raises(DomainError):
        coding.same_fiber(q(-1, 2), q(1))


def test_unbounded_fiber_witness(coding):
    code = coding.unbounded_fiber_witness(3)
    assert code == PowerCode(15)
    assert code.label(coding.max_code_bits) == "-1/32768"
    assert len(coding.code_fiber(code)) == 4
    big = coding.unbounded_fiber_witness(31)
    assert big.value(coding.max_code_bits) is None
    assert big.label(coding.max_code_bits) == f"-1/2^{2 ** 32 - 1}"
    assert len(coding.code_fiber(big)) == 32


@pytest.mark.parametrize("n", [0, 1, 5, 20, 64])
def test_witness_fiber_exceeds_bound(coding, n):
    assert len(coding.code_fiber(coding.unbounded_fiber_witness(n))) > n


def test_realize_labels(coding):
    cell = cell_of_point([q(-2), q(-1)])
    box = Box(((q(-1), q(-1, 2)), (q(-1), q(-1, 4))))
    labels = [FiniteSetQ.of([q(1)]), FiniteSetQ.of([q(1, 2)])]
    first, second = coding.realize_labels(cell, box, labels)
    assert first < second
    assert box.contains([first, second])
    assert coding.rho(first) == labels[0] and coding.rho(second) == labels[1]


def test_realize_labels_equal_block(coding):
    cell = cell_of_point([q(-1), q(-1)])
    box = Box(((q(-1), q(-1, 2)), (q(-3, 4), q(-1, 4))))
    label = FiniteSetQ.of([q(3)])
    first, second = coding.realize_labels(cell, box, [label, label])
    assert first == second and -q(3, 4) < first < -q(1, 2)
    with pytest.raises(DomainError):
        coding.realize_labels(cell, box, [label, EMPTY_SET])


def test_realize_labels_pinned_parameter(coding):
    cell = cell_of_point([q(-1, 2)], [q(-1, 2)])
    box = Box(((q(-1), q(-1, 4)),))
    assert coding.realize_labels(cell, box, [FiniteSetQ.of([q(1)])]) == (q(-1, 2),)
    with pytest.raises(DomainError):
        coding.realize_labels(cell, box, [EMPTY_SET])
