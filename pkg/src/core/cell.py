from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from src.core.formula import Const, Eq, Formula, Guard, Lt, Var, conj
from src.core.rational import Rational, format_rational

Anchor = Union[Var, Rational]


@dataclass(frozen=True)
class Block:
    """Variables sharing one position of the chain, pinned to at most one parameter"""
    variables: FrozenSet[Var]
    parameter: Optional[Rational] = None

    def term(self):
        if self.parameter is not None:
            return Const(self.parameter)
        return min(self.variables, key=lambda v: v.name)


@dataclass(frozen=True)
class OrderCell:
    """Complete order cell: a strictly increasing chain of blocks over variables and parameters"""
    variables: Tuple[Var, ...]
    parameters: Tuple[Rational, ...]
    blocks: Tuple[Block, ...]
    ambient: Optional[Guard] = None

    def position(self, anchor: Anchor) -> int:
        for index, block in enumerate(self.blocks):
            if isinstance(anchor, Var):
                if anchor in block.variables:
                    return index
            elif block.parameter == anchor:
                return index
        raise KeyError(anchor)

    def relation(self, left: Anchor, right: Anchor) -> int:
        """-1, 0 or 1 as left is below, equal to or above right in the cell"""
        a, b = self.position(left), self.position(right)
        return (a > b) - (a < b)

    def block_of(self, var: Var) -> Block:
        return self.blocks[self.position(var)]

    def variable_blocks(self) -> List[Block]:
        return [b for b in self.blocks if b.variables]

    def representative(self) -> Dict[Var, Rational]:
        """Deterministic sample point of the cell"""
        values: Dict[Var, Rational] = {}
        pending: List[Block] = []
        low: Optional[Rational] = None

        def flush(low: Optional[Rational], high: Optional[Rational]):
            if self.ambient == Guard.NEG and (high is None or high > 0):
                high = Rational(0)
            if self.ambient == Guard.POS and (low is None or low < 0):
                low = Rational(0)
            k = len(pending)
            for i, block in enumerate(pending, start=1):
                if low is not None and high is not None:
                    value = low + i * (high - low) / (k + 1)
                elif high is not None:
                    value = high - (k + 1 - i)
                elif low is not None:
                    value = low + i
                else:
                    value = Rational(i)
                for var in block.variables:
                    values[var] = value
            pending.clear()

        for block in self.blocks:
            if block.parameter is None:
                pending.append(block)
                continue
            flush(low, block.parameter)
            for var in block.variables:
                values[var] = block.parameter
            low = block.parameter
        flush(low, None)
        return values

    def to_formula(self, include_ambient: bool = False) -> Formula:
        """Chain conjunction; it entails every order relation among the anchors"""
        parts = []
        previous = None
        for block in self.blocks:
            term = block.term()
            for var in sorted(block.variables, key=lambda v: v.name):
                if var != term:
                    parts.append(Eq(var, term))
            if previous is not None and not (isinstance(previous, Const) and isinstance(term, Const)):
                parts.append(Lt(previous, term))
            previous = term
        if include_ambient and self.ambient is not None:
            zero = Const(Rational(0))
            for block in self.variable_blocks():
                if block.parameter is not None:
                    continue
                term = block.term()
                parts.append(Lt(term, zero) if self.ambient == Guard.NEG else Lt(zero, term))
        return conj(*parts)

    def __str__(self):
        chunks = []
        for block in self.blocks:
            names = sorted(v.name for v in block.variables)
            if block.parameter is not None:
                names.append(format_rational(block.parameter))
            chunks.append(" = ".join(names))
        return " < ".join(chunks) if chunks else "true"


# ---------------------------------------------------------------- unary sets

@dataclass(frozen=True)
class IntervalPart:
    """A point (low == high) or an open interval; None endpoints are infinite"""
    kind: str
    low: Optional[Rational]
    high: Optional[Rational]

    @classmethod
    def point(cls, value: Rational) -> "IntervalPart":
        return cls("point", value, value)

    @classmethod
    def interval(cls, low: Optional[Rational], high: Optional[Rational]) -> "IntervalPart":
        if low is not None and high is not None and not low < high:
            raise ValueError("empty interval")
        return cls("interval", low, high)

    def contains(self, x: Rational) -> bool:
        if self.kind == "point":
            return x == self.low
        return (self.low is None or self.low < x) and (self.high is None or x < self.high)

    def __str__(self):
        if self.kind == "point":
            return "{" + format_rational(self.low) + "}"
        low = "-inf" if self.low is None else format_rational(self.low)
        high = "+inf" if self.high is None else format_rational(self.high)
        return f"({low}, {high})"


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint points and open intervals in normal form"""
    parts: Tuple[IntervalPart, ...] = ()

    @classmethod
    def normalize(cls, parts: List[IntervalPart]) -> "IntervalUnion":
        """Sort and merge every interval, point, interval run sharing endpoints"""
        def key(part):
            low = part.low
            return (low is not None, low if low is not None else 0, part.kind == "interval")

        merged: List[IntervalPart] = []
        for part in sorted(parts, key=key):
            merged.append(part)
            while len(merged) >= 3:
                a, p, b = merged[-3:]
                if (a.kind == "interval" and p.kind == "point" and b.kind == "interval"
                        and a.high is not None and a.high == p.low == b.low):
                    merged[-3:] = [IntervalPart.interval(a.low, b.high)]
                else:
                    break
        return cls(tuple(merged))

    def contains(self, x: Rational) -> bool:
        return any(part.contains(x) for part in self.parts)

    def is_empty(self) -> bool:
        return not self.parts

    def __str__(self):
        if not self.parts:
            return "∅"
        return " ∪ ".join(str(p) for p in self.parts)


EMPTY_UNION = IntervalUnion()
