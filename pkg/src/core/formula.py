from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Set, Tuple, Union

from src.core.errors import SortError
from src.core.finite_set import FiniteSetQ
from src.core.rational import Rational


class Sort(str, Enum):
    ELEM = "elem"
    SET = "set"


class Guard(str, Enum):
    NEG = "neg"
    POS = "pos"


class Language(str, Enum):
    ORDER_A = "order-A"
    WMSO = "wmso"


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort = Sort.ELEM

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: Rational

    def __str__(self):
        from src.core.rational import format_rational
        return format_rational(self.value)


@dataclass(frozen=True)
class SetLit:
    elements: FiniteSetQ

    def __str__(self):
        return str(self.elements)


Term = Union[Var, Const, SetLit]

ZERO = Const(Rational(0))


def term_sort(term: Term) -> Sort:
    if isinstance(term, Var):
        return term.sort
    if isinstance(term, SetLit):
        return Sort.SET
    return Sort.ELEM


def term_key(term: Term) -> tuple:
    """Total order on terms, used to orient symmetric atoms"""
    if isinstance(term, Const):
        return (0, term.value, "")
    if isinstance(term, SetLit):
        return (1, len(term.elements), str(term.elements))
    return (2, 0, term.name)


# ---------------------------------------------------------------- formulas

class Formula:
    """Node of the shared formula AST; atoms, connectives and quantifiers below"""

    def __str__(self):
        from src.utils.formatters import print_formula
        return print_formula(self)


# Two-sorted formulas share the same node classes; the alias documents intent.
WFormula = Formula


@dataclass(frozen=True, repr=False)
class Top(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True, repr=False)
class Lt(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class A(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class In(Formula):
    elem: Term
    set_term: Term


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True, repr=False)
class Or(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True, repr=False)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: Var
    body: Formula
    guard: Optional[Guard] = None


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: Var
    body: Formula
    guard: Optional[Guard] = None


ATOMS = (Lt, Eq, A, In)
QUANTIFIERS = (Exists, Forall)

for _cls in (Top, Bottom, Lt, Eq, A, In, Not, And, Or, Imp, Exists, Forall):
    _cls.__repr__ = lambda self: f"<{type(self).__name__} {self}>"


def atom_terms(f: Formula) -> Tuple[Term, Term]:
    if isinstance(f, In):
        return f.elem, f.set_term
    return f.left, f.right


def rebuild_atom(f: Formula, left: Term, right: Term) -> Formula:
    return type(f)(left, right)


def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, Imp):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    for child in children(f):
        yield from walk(child)


# ---------------------------------------------------------------- smart constructors

def conj(*args: Formula) -> Formula:
    """Conjunction with flattening, constant folding and duplicate removal"""
    parts = []
    for arg in _flatten(args, And):
        if isinstance(arg, Bottom):
            return FALSE
        if isinstance(arg, Top) or arg in parts:
            continue
        parts.append(arg)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def disj(*args: Formula) -> Formula:
    """Disjunction with flattening, constant folding and duplicate removal"""
    parts = []
    for arg in _flatten(args, Or):
        if isinstance(arg, Top):
            return TRUE
        if isinstance(arg, Bottom) or arg in parts:
            continue
        parts.append(arg)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(tuple(parts))


def neg(f: Formula) -> Formula:
    if isinstance(f, Top):
        return FALSE
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, Not):
        return f.body
    return Not(f)


def imp(left: Formula, right: Formula) -> Formula:
    if isinstance(left, Bottom) or isinstance(right, Top):
        return TRUE
    if isinstance(left, Top):
        return right
    if isinstance(right, Bottom):
        return neg(left)
    return Imp(left, right)


def _flatten(args: Iterable[Formula], kind: type) -> Iterator[Formula]:
    for arg in args:
        if isinstance(arg, kind):
            yield from arg.args
        else:
            yield arg


def exists(var: Var, body: Formula, guard: Optional[Guard] = None) -> Formula:
    # every domain (ℚ, ℚ_<0, ℚ_>0, finite sets) is nonempty
    if var not in free_variables(body):
        return body
    return Exists(var, body, guard)


def forall(var: Var, body: Formula, guard: Optional[Guard] = None) -> Formula:
    if var not in free_variables(body):
        return body
    return Forall(var, body, guard)


# ---------------------------------------------------------------- variables

def free_variables(f: Formula) -> FrozenSet[Var]:
    """Free variables, each carrying its sort"""
    return frozenset(_free(f))


def _free(f: Formula) -> Set[Var]:
    if isinstance(f, ATOMS):
        return {t for t in atom_terms(f) if isinstance(t, Var)}
    if isinstance(f, QUANTIFIERS):
        return _free(f.body) - {f.var}
    result: Set[Var] = set()
    for child in children(f):
        result |= _free(child)
    return result


def all_names(f: Formula) -> Set[str]:
    names = set()
    for node in walk(f):
        if isinstance(node, ATOMS):
            names |= {t.name for t in atom_terms(node) if isinstance(t, Var)}
        elif isinstance(node, QUANTIFIERS):
            names.add(node.var.name)
    return names


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def constants(f: Formula) -> FrozenSet[Rational]:
    """Element literals occurring in f"""
    values = set()
    for node in walk(f):
        if isinstance(node, ATOMS):
            values |= {t.value for t in atom_terms(node) if isinstance(t, Const)}
    return frozenset(values)


def set_literals(f: Formula) -> FrozenSet[FiniteSetQ]:
    values = set()
    for node in walk(f):
        if isinstance(node, ATOMS):
            values |= {t.elements for t in atom_terms(node) if isinstance(t, SetLit)}
    return frozenset(values)


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(node, QUANTIFIERS) for node in walk(f))


# ---------------------------------------------------------------- substitution

def substitute(f: Formula, bindings: Mapping[Var, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution"""
    for var, term in bindings.items():
        if var.sort != term_sort(term):
            raise SortError("substitution changes sort", f"{var} := {term}")
    return _subst(f, dict(bindings))


def _subst(f: Formula, bindings: Dict[Var, Term]) -> Formula:
    if not bindings:
        return f
    if isinstance(f, ATOMS):
        left, right = atom_terms(f)
        return rebuild_atom(f, bindings.get(left, left), bindings.get(right, right))
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Not):
        return Not(_subst(f.body, bindings))
    if isinstance(f, And):
        return And(tuple(_subst(a, bindings) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_subst(a, bindings) for a in f.args))
    if isinstance(f, Imp):
        return Imp(_subst(f.left, bindings), _subst(f.right, bindings))
    # quantifier
    inner = {v: t for v, t in bindings.items() if v != f.var}
    body_free = free_variables(f.body)
    inner = {v: t for v, t in inner.items() if v in body_free}
    if not inner:
        return f
    incoming = {t for t in inner.values() if isinstance(t, Var)}
    var = f.var
    if var in incoming:
        avoid = all_names(f.body) | {t.name for t in incoming} | {v.name for v in inner}
        renamed = Var(fresh_name(var.name, avoid), var.sort)
        inner[var] = renamed
        var = renamed
    return type(f)(var, _subst(f.body, inner), f.guard)
