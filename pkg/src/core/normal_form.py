from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple

from src.core.formula import Formula, Term, Var
from src.core.rational import Rational


class Sign(str, Enum):
    NEG = "neg"
    ZERO = "zero"
    POS = "pos"


def sign_of(x: Rational) -> Sign:
    if x < 0:
        return Sign.NEG
    if x > 0:
        return Sign.POS
    return Sign.ZERO


@dataclass(frozen=True)
class SignStratum:
    """Sign tag per free variable, kept sorted by variable name"""
    signs: Tuple[Tuple[Var, Sign], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[Var, Sign]) -> "SignStratum":
        return cls(tuple(sorted(mapping.items(), key=lambda item: item[0].name)))

    @classmethod
    def of_point(cls, point: Mapping[Var, Rational]) -> "SignStratum":
        return cls.of({var: sign_of(value) for var, value in point.items()})

    @classmethod
    def all_for(cls, variables: Sequence[Var]) -> Iterator["SignStratum"]:
        ordered = sorted(variables, key=lambda v: v.name)
        for signs in product(list(Sign), repeat=len(ordered)):
            yield cls(tuple(zip(ordered, signs)))

    def as_dict(self) -> Dict[Var, Sign]:
        return dict(self.signs)

    def variables(self, sign: Sign) -> List[Var]:
        return [var for var, s in self.signs if s == sign]

    def __str__(self):
        symbol = {Sign.NEG: "<0", Sign.ZERO: "=0", Sign.POS: ">0"}
        return ", ".join(f"{var.name}{symbol[s]}" for var, s in self.signs) or "()"


@dataclass(frozen=True)
class RelativeNormalForm:
    """Disjunction of (chi, theta) pairs valid on one sign stratum"""
    stratum: SignStratum
    disjuncts: Tuple[Tuple[Formula, Formula], ...]

    def is_false(self) -> bool:
        return not self.disjuncts


@dataclass(frozen=True)
class MembershipPattern:
    """bits[i][j] says whether elements[i] belongs to sets[j]"""
    elements: Tuple[Term, ...]
    sets: Tuple[Term, ...]
    bits: Tuple[Tuple[bool, ...], ...]

    @classmethod
    def enumerate(cls, elements: Sequence[Term], sets: Sequence[Term]) -> Iterator["MembershipPattern"]:
        cells = len(elements) * len(sets)
        for flat in product((False, True), repeat=cells):
            rows = tuple(tuple(flat[i * len(sets):(i + 1) * len(sets)]) for i in range(len(elements)))
            yield cls(tuple(elements), tuple(sets), rows)

    def bit(self, element: Term, set_term: Term) -> bool:
        return self.bits[self.elements.index(element)][self.sets.index(set_term)]

    def is_consistent(self, equal_elements: Sequence[Tuple[Term, Term]] = (),
                      equal_sets: Sequence[Tuple[Term, Term]] = ()) -> bool:
        """Equal elements share rows, equal sets share columns"""
        for left, right in equal_elements:
            if self.bits[self.elements.index(left)] != self.bits[self.elements.index(right)]:
                return False
        for left, right in equal_sets:
            a, b = self.sets.index(left), self.sets.index(right)
            if any(row[a] != row[b] for row in self.bits):
                return False
        return True
