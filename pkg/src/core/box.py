from dataclasses import dataclass
from typing import Sequence, Tuple

from src.core.errors import DomainError
from src.core.rational import Rational, format_rational

Interval = Tuple[Rational, Rational]


@dataclass(frozen=True)
class Box:
    """Open box: a product of intervals below zero times a product of intervals above zero"""
    negative: Tuple[Interval, ...] = ()
    positive: Tuple[Interval, ...] = ()

    def __post_init__(self):
        for low, high in self.negative:
            if not low < high <= 0:
                raise DomainError(f"negative box side ({format_rational(low)}, {format_rational(high)}) must satisfy l < u <= 0")
        for low, high in self.positive:
            if not 0 <= low < high:
                raise DomainError(f"positive box side ({format_rational(low)}, {format_rational(high)}) must satisfy 0 <= p < q")

    @classmethod
    def around(cls, negative: Sequence[Rational], positive: Sequence[Rational], radius: Rational) -> "Box":
        """Box of the given radius around a point, clipped at zero"""
        return cls(
            tuple((x - radius, min(x + radius, Rational(0))) for x in negative),
            tuple((max(y - radius, Rational(0)), y + radius) for y in positive),
        )

    def contains(self, negative: Sequence[Rational], positive: Sequence[Rational] = ()) -> bool:
        return (
            all(low < x < high for x, (low, high) in zip(negative, self.negative))
            and all(low < y < high for y, (low, high) in zip(positive, self.positive))
        )

    def __str__(self):
        sides = [f"({format_rational(a)}, {format_rational(b)})" for a, b in self.negative + self.positive]
        return " × ".join(sides) if sides else "{()}"
