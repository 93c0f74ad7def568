from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

from src.core.errors import DomainError
from src.core.rational import Rational, format_rational


@dataclass(frozen=True)
class FiniteSetQ:
    """Finite set of positive rationals, stored strictly increasing"""
    elements: Tuple[Rational, ...] = ()

    def __post_init__(self):
        for left, right in zip(self.elements, self.elements[1:]):
            if not left < right:
                raise DomainError("set elements must be strictly increasing")
        if self.elements and self.elements[0] <= 0:
            raise DomainError(f"set elements must be positive, got {format_rational(self.elements[0])}")

    @classmethod
    def of(cls, items: Iterable[Rational]) -> "FiniteSetQ":
        return cls(tuple(sorted(set(items))))

    def __contains__(self, item: Rational) -> bool:
        return item in self.elements

    def __iter__(self) -> Iterator[Rational]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __str__(self) -> str:
        return "{" + ", ".join(format_rational(e) for e in self.elements) + "}"

    def to_strings(self) -> list:
        return [format_rational(e) for e in self.elements]


EMPTY_SET = FiniteSetQ()
