import re
from enum import Enum
from fractions import Fraction
from typing import Union

from src.core.errors import DomainError

# Fraction keeps lowest terms with the sign on the numerator.
Rational = Fraction

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class Order(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


def make_rational(num: int, den: int = 1) -> Rational:
    """Canonical lowest-terms rational num/den"""
    if den == 0:
        raise DomainError("zero denominator")
    return Fraction(num, den)


def compare(a: Rational, b: Rational) -> Order:
    """Trichotomous comparison by cross-multiplication"""
    left = a.numerator * b.denominator
    right = b.numerator * a.denominator
    if left < right:
        return Order.LESS
    if left > right:
        return Order.GREATER
    return Order.EQUAL


def between(a: Rational, b: Rational) -> Rational:
    """Arithmetic midpoint of a < b"""
    if not a < b:
        raise DomainError(f"between needs a < b, got {format_rational(a)} and {format_rational(b)}")
    return (a + b) / 2


def v2_denominator(x: Rational) -> int:
    """Exponent of 2 in the denominator"""
    den = x.denominator
    return (den & -den).bit_length() - 1


def parse_rational(text: str) -> Rational:
    """Read "p/q" or "p"; the result is always in lowest terms"""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise DomainError(f"not a rational literal: {text!r}")
    if "/" in text:
        num, den = text.split("/")
        return make_rational(int(num), int(den))
    return make_rational(int(text))


def is_rational_literal(text: str) -> bool:
    return bool(_RATIONAL_RE.match(text))


def format_rational(x: Union[Rational, int]) -> str:
    """Textual form p/q, or p when the denominator is 1"""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
