import logging
from dataclasses import dataclass
from math import floor
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.config import Config
from src.core.box import Box
from src.core.cell import OrderCell
from src.core.errors import DomainError
from src.core.finite_set import EMPTY_SET, FiniteSetQ
from src.core.rational import Rational, format_rational, v2_denominator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerCode:
    """The negative rational -1/2^exponent, kept symbolic when the exponent is large"""
    exponent: int

    def value(self, max_bits: int) -> Optional[Rational]:
        if self.exponent > max_bits:
            return None
        return Rational(-1, 2 ** self.exponent)

    def label(self, max_bits: int) -> str:
        value = self.value(max_bits)
        if value is None:
            return f"-1/2^{self.exponent}"
        return format_rational(value)


Code = Union[Rational, PowerCode]


class CodingService:
    """Dense coding of finite sets of positive rationals by negative rationals"""

    def __init__(self, index_limit: int = Config.INDEX_SEARCH_LIMIT, max_code_bits: int = Config.MAX_CODE_BITS):
        self.index_limit = index_limit
        self.max_code_bits = max_code_bits

    # ------------------------------------------------------------ enumeration of ℚ_>0

    @staticmethod
    def enum_positive_rational(i: int) -> Rational:
        """i-th term of the Calkin-Wilf sequence, starting 1, 1/2, 2, 1/3"""
        if i < 0:
            raise DomainError("enumeration index must be nonnegative")
        a, b = 1, 1
        for bit in bin(i + 1)[3:]:
            if bit == "0":
                b = a + b
            else:
                a = a + b
        return Rational(a, b)

    def index_of(self, q: Rational) -> int:
        """Position of q in the enumeration"""
        if q <= 0:
            raise DomainError(f"{format_rational(q)} is not a positive rational")
        a, b = q.numerator, q.denominator
        bits: List[str] = []
        max_depth = self.index_limit.bit_length()
        while (a, b) != (1, 1):
            if len(bits) >= max_depth:
                raise DomainError(f"index of {format_rational(q)} exceeds the search limit {self.index_limit}")
            if a < b:
                bits.append("0")
                b = b - a
            else:
                bits.append("1")
                a = a - b
        index = int("1" + "".join(reversed(bits)), 2) - 1
        if index > self.index_limit:
            raise DomainError(f"index of {format_rational(q)} exceeds the search limit {self.index_limit}")
        return index

    # ------------------------------------------------------------ finite sets

    def set_of_index(self, n: int) -> FiniteSetQ:
        """F_n: the enumerated rationals at the set bits of n"""
        if n < 0:
            raise DomainError("set index must be nonnegative")
        return FiniteSetQ.of(self.enum_positive_rational(i) for i in range(n.bit_length()) if n >> i & 1)

    def index_of_set(self, values: FiniteSetQ) -> int:
        return sum(1 << self.index_of(q) for q in values)

    # ------------------------------------------------------------ the coding ρ and the relation A

    def rho(self, x: Rational) -> FiniteSetQ:
        if x >= 0:
            raise DomainError(f"rho is defined on negative rationals only, got {format_rational(x)}")
        return self.set_of_index(v2_denominator(x))

    def code_fiber(self, code: Code) -> FiniteSetQ:
        if isinstance(code, PowerCode):
            return self.set_of_index(code.exponent)
        return self.fiber(code)

    def eval_A(self, x: Rational, y: Rational) -> bool:
        return x < 0 < y and y in self.rho(x)

    def fiber(self, x: Rational) -> FiniteSetQ:
        """A_x: rho(x) below zero, empty otherwise"""
        if x < 0:
            return self.rho(x)
        return EMPTY_SET

    def same_fiber(self, x: Rational, x_prime: Rational) -> bool:
        if x >= 0 or x_prime >= 0:
            raise DomainError("same_fiber compares negative rationals")
        return self.rho(x) == self.rho(x_prime)

    # ------------------------------------------------------------ density of codes

    def find_code_in_interval(self, n: int, a: Rational, b: Rational) -> Rational:
        """Deterministic x in (a, b) with v2 of its denominator equal to n"""
        a, b = Rational(a), Rational(b)
        if not a < b or b > 0:
            raise DomainError(f"interval ({format_rational(a)}, {format_rational(b)}) is not inside the negatives")
        if n < 0:
            raise DomainError("code index must be nonnegative")
        width = b - a
        m = 0
        while Rational(7, 2 ** n * 3 ** m) >= width:
            m += 1
        denominator = 2 ** n * 3 ** m
        p = floor(-b * denominator) + 1
        while p < -a * denominator:
            if (n == 0 or p % 2 == 1) and p % 3 != 0:
                return Rational(-p, denominator)
            p += 1
        raise DomainError("no admissible numerator in the window")

    def find_labelled(self, values: FiniteSetQ, a: Rational, b: Rational) -> Rational:
        return self.find_code_in_interval(self.index_of_set(values), a, b)

    def unbounded_fiber_witness(self, n: int) -> PowerCode:
        """-1/2^(2^(n+1)-1), whose fiber has exactly n+1 elements"""
        if n < 0:
            raise DomainError("witness size must be nonnegative")
        return PowerCode(2 ** (n + 1) - 1)

    # ------------------------------------------------------------ label realization

    def realize_labels(self, cell: OrderCell, box: Box, labels: Sequence[FiniteSetQ]) -> Tuple[Rational, ...]:
        """Point of box ∩ cell whose coordinates code the given labels"""
        variables = cell.variables
        if len(labels) != len(variables) or len(box.negative) != len(variables):
            raise DomainError("cell, box and labels disagree on arity")
        label_of = dict(zip(variables, labels))
        side_of = dict(zip(variables, box.negative))
        values: Dict = {}
        free_blocks = []
        for block in cell.blocks:
            if not block.variables:
                continue
            block_labels = {label_of[v] for v in block.variables}
            if len(block_labels) > 1:
                raise DomainError(f"incompatible labels: cell forces {sorted(v.name for v in block.variables)} equal")
            label = block_labels.pop()
            if block.parameter is not None:
                c = block.parameter
                if c >= 0 or self.rho(c) != label:
                    raise DomainError(f"incompatible labels: cell forces a coordinate to equal {format_rational(c)}")
                if not all(side_of[v][0] < c < side_of[v][1] for v in block.variables):
                    raise DomainError("box does not meet the cell")
                for v in block.variables:
                    values[v] = c
            else:
                free_blocks.append(block)

        # bounds from the box, neighbouring parameters and zero
        lows, highs = {}, {}
        for index, block in enumerate(cell.blocks):
            if block.parameter is not None or not block.variables:
                continue
            low = max(side_of[v][0] for v in block.variables)
            high = min([side_of[v][1] for v in block.variables] + [Rational(0)])
            previous = [b.parameter for b in cell.blocks[:index] if b.parameter is not None]
            following = [b.parameter for b in cell.blocks[index + 1:] if b.parameter is not None]
            if previous:
                low = max(low, previous[-1])
            if following:
                high = min(high, following[0])
            lows[block], highs[block] = low, high

        upper: Dict = {}
        limit = None
        for block in reversed(free_blocks):
            limit = highs[block] if limit is None else min(highs[block], limit)
            upper[block] = limit
        floor_value = None
        for block in free_blocks:
            low = lows[block] if floor_value is None else max(lows[block], floor_value)
            if not low < upper[block]:
                raise DomainError("box does not meet the cell")
            label = label_of[next(iter(block.variables))]
            x = self.find_labelled(label, low, upper[block])
            for v in block.variables:
                values[v] = x
            floor_value = x
        logger.debug("realized labels %s at %s", [str(l) for l in labels], [format_rational(values[v]) for v in variables])
        return tuple(values[v] for v in variables)
