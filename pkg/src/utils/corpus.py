import random
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.finite_set import FiniteSetQ
from src.core.formula import (
    A, And, Const, Eq, Exists, Forall, Formula, Guard, In, Lt, Not, Or, SetLit, Sort, Term, Var,
    ZERO, conj, disj,
)
from src.core.rational import Rational

# Deterministic corpora for differential checks

ORDER_CONSTANTS = (Rational(-1), Rational(0), Rational(1, 2), Rational(2))
WMSO_CONSTANTS = (Rational(1, 2), Rational(1), Rational(3, 2), Rational(2))
ORDER_A_CONSTANTS = (Rational(-3, 2), Rational(-1, 2), Rational(1), Rational(2))
SAMPLE_VALUES = tuple(Rational(n, d) for n, d in [
    (-2, 1), (-3, 2), (-1, 1), (-3, 4), (-1, 2), (-1, 4), (-1, 8), (0, 1),
    (1, 3), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1),
])


class _Names:
    def __init__(self, prefix: str):
        self.prefix = prefix
        self.count = 0

    def fresh(self, sort: Sort = Sort.ELEM) -> Var:
        self.count += 1
        return Var(f"{self.prefix}{self.count}", sort)


# ---------------------------------------------------------------- pure order

def order_formula(rng: random.Random, terms: Sequence[Term], depth: int, names: _Names) -> Formula:
    """Random first-order formula of the rational order over the given terms"""
    if depth <= 0 or rng.random() < 0.25:
        left, right = rng.choice(terms), rng.choice(terms)
        return Lt(left, right) if rng.random() < 0.6 else Eq(left, right)
    roll = rng.random()
    if roll < 0.15:
        return Not(order_formula(rng, terms, depth - 1, names))
    if roll < 0.55:
        kind = And if rng.random() < 0.5 else Or
        return kind((order_formula(rng, terms, depth - 1, names), order_formula(rng, terms, depth - 1, names)))
    var = names.fresh()
    kind = Exists if rng.random() < 0.5 else Forall
    guard = rng.choice([None, None, Guard.NEG, Guard.POS])
    return kind(var, order_formula(rng, list(terms) + [var, var], depth - 1, names), guard)


def order_corpus(seed: int, count: int, arity: int = 2, depth: int = 4) -> List[Formula]:
    rng = random.Random(seed)
    variables = [Var(f"x{i}") for i in range(1, arity + 1)]
    terms = variables + [Const(c) for c in ORDER_CONSTANTS]
    return [order_formula(rng, terms, depth, _Names("b")) for _ in range(count)]


# ---------------------------------------------------------------- weak monadic fragment

def wmso_formula(rng: random.Random, scope: List[Term], depth: int, names: _Names, quantifiers: int = 3) -> Formula:
    """Random weak monadic formula over the terms in scope, with at most the given quantifiers on a branch"""
    elements = [t for t in scope if not isinstance(t, Var) or t.sort == Sort.ELEM]
    sets = [t for t in scope if isinstance(t, Var) and t.sort == Sort.SET]
    if depth <= 0 or rng.random() < 0.2:
        return _wmso_atom(rng, elements, sets)
    roll = rng.random()
    if roll < 0.1:
        return Not(wmso_formula(rng, scope, depth - 1, names, quantifiers))
    if roll < 0.45 or quantifiers <= 0:
        kind = And if rng.random() < 0.5 else Or
        return kind((wmso_formula(rng, scope, depth - 1, names, quantifiers // 2),
                     wmso_formula(rng, scope, depth - 1, names, quantifiers // 2)))
    sort = Sort.SET if rng.random() < 0.45 else Sort.ELEM
    var = names.fresh(sort)
    kind = Exists if rng.random() < 0.5 else Forall
    body = wmso_formula(rng, scope + [var], depth - 1, names, quantifiers - 1)
    return kind(var, body)


def _wmso_atom(rng: random.Random, elements: List[Term], sets: List[Var]) -> Formula:
    memberships = [(e, s) for e in elements for s in sets]
    roll = rng.random()
    if memberships and roll < 0.5:
        e, s = rng.choice(memberships)
        return In(e, s)
    if sets and roll < 0.6:
        return Eq(rng.choice(sets), SetLit(FiniteSetQ.of(rng.sample(WMSO_CONSTANTS, rng.randint(0, 2)))))
    left, right = rng.choice(elements), rng.choice(elements)
    return Lt(left, right) if rng.random() < 0.6 else Eq(left, right)


def wmso_corpus(seed: int, count: int, depth: int = 4) -> List[Tuple[Formula, Dict[Var, object]]]:
    """Formulas with one free element and one free set, paired with values"""
    rng = random.Random(seed)
    y, s = Var("y"), Var("S", Sort.SET)
    scope = [y, s] + [Const(c) for c in WMSO_CONSTANTS]
    corpus = []
    for _ in range(count):
        formula = wmso_formula(rng, scope, depth, _Names("v"))
        env = {
            y: rng.choice([c for c in SAMPLE_VALUES if c > 0]),
            s: FiniteSetQ.of(rng.sample(WMSO_CONSTANTS, rng.randint(0, 3))),
        }
        corpus.append((formula, env))
    return corpus


# ---------------------------------------------------------------- order with A

def order_a_formula(rng: random.Random, terms: Sequence[Term], depth: int, names: _Names,
                    quantifiers: int = 2) -> Formula:
    if depth <= 0 or rng.random() < 0.25:
        left, right = rng.choice(terms), rng.choice(terms)
        roll = rng.random()
        if roll < 0.45:
            return A(left, right)
        return Lt(left, right) if roll < 0.8 else Eq(left, right)
    roll = rng.random()
    if roll < 0.15:
        return Not(order_a_formula(rng, terms, depth - 1, names, quantifiers))
    if roll < 0.6 or quantifiers <= 0:
        kind = And if rng.random() < 0.5 else Or
        return kind((order_a_formula(rng, terms, depth - 1, names, quantifiers // 2),
                     order_a_formula(rng, terms, depth - 1, names, quantifiers // 2)))
    var = names.fresh()
    kind = Exists if rng.random() < 0.5 else Forall
    guard = rng.choice([None, Guard.NEG, Guard.POS])
    return kind(var, order_a_formula(rng, list(terms) + [var, var], depth - 1, names, quantifiers - 1), guard)


def order_a_corpus(seed: int, count: int, depth: int = 3) -> List[Formula]:
    """Formulas in x, y over the order, zero and A"""
    rng = random.Random(seed)
    terms = [Var("x"), Var("y")] + [Const(c) for c in ORDER_A_CONSTANTS]
    return [order_a_formula(rng, terms, depth, _Names("t")) for _ in range(count)]


def sample_points(seed: int, count: int, variables: Sequence[Var]) -> List[Dict[Var, Rational]]:
    rng = random.Random(seed)
    return [{v: rng.choice(SAMPLE_VALUES) for v in variables} for _ in range(count)]


# ---------------------------------------------------------------- open unary sets

def open_unary_bases(var: Optional[Var] = None) -> List[Formula]:
    """Unary formulas open by construction"""
    y = var or Var("y")
    x = Var("t")
    zero = ZERO
    bases: List[Formula] = []
    points = [Rational(-3, 2), Rational(-1, 2), Rational(1, 2), Rational(1), Rational(2)]
    for c in points:
        bases += [Lt(y, Const(c)), Lt(Const(c), y)]
    for a, b in combinations(points, 2):
        bases.append(And((Lt(Const(a), y), Lt(y, Const(b)))))
    for c in (Rational(-1, 2), Rational(-1, 8), Rational(-3, 4)):
        # a finite fiber is closed, so its complement is open
        bases.append(Not(A(Const(c), y)))
    bases.append(And((Lt(zero, y), Exists(x, A(x, y), Guard.NEG))))
    bases.append(And((Lt(zero, y), Exists(x, And((Lt(Const(Rational(-1)), x), A(x, y)))))))
    bases.append(Or((Lt(y, zero), Exists(x, And((Lt(x, Const(Rational(-1, 2))), A(x, y)))))))
    return bases


def open_unary_catalogue(seed: int, count: int = 50, var: Optional[Var] = None) -> List[Formula]:
    """Finite unions and intersections of open bases, deduplicated"""
    rng = random.Random(seed)
    bases = open_unary_bases(var)
    catalogue: List[Formula] = []
    seen = set()
    for base in bases[: count // 2]:
        seen.add(base)
        catalogue.append(base)
    while len(catalogue) < count:
        picked = rng.sample(bases, rng.randint(2, 3))
        formula = conj(*picked) if rng.random() < 0.5 else disj(*picked)
        if formula in seen:
            continue
        seen.add(formula)
        catalogue.append(formula)
    return catalogue
