import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.config import Config
from src.core.cell import IntervalPart, IntervalUnion, OrderCell
from src.core.errors import DomainError
from src.core.finite_set import EMPTY_SET, FiniteSetQ
from src.core.formula import (
    FALSE, TRUE, Bottom, Const, Eq, Exists, Formula, Forall, Guard, Lt, SetLit, Top, Var,
    ZERO, conj, constants, disj, free_variables, imp, substitute,
)
from src.core.normal_form import RelativeNormalForm, Sign, SignStratum
from src.core.rational import Rational, between, format_rational
from src.services import dlo_service
from src.services.coding_service import CodingService, PowerCode
from src.services.dlo_service import describe_unary, eliminate_quantifiers, enumerate_cells, evaluate_order, simplify
from src.services.rnf_service import RnfService, set_variable
from src.services.wmso_service import WmsoService

logger = logging.getLogger(__name__)

Sides = Dict[Var, Tuple[Rational, Rational]]
Witness = Tuple[Dict[Var, Rational], Dict[Var, FiniteSetQ]]


def lower_variable(var: Var) -> Var:
    return Var(f"l_{var.name}")


def upper_variable(var: Var) -> Var:
    return Var(f"u_{var.name}")


def sorted_variables(f: Formula) -> List[Var]:
    return sorted(free_variables(f), key=lambda v: v.name)


@dataclass
class Certificate:
    """Complement points found in the 2^-k boxes around a point"""
    point: Dict[Var, Rational]
    depth: int
    found: bool
    witnesses: List[Tuple[int, Dict[Var, Rational], Dict[Var, FiniteSetQ]]] = field(default_factory=list)
    failed_at: Optional[int] = None


@dataclass
class OpenCoreResult:
    is_open: bool
    variable: Var
    interior: Formula
    description: IntervalUnion
    witness: Optional[Rational] = None
    certificate: Optional[Certificate] = None
    fibers: Dict[Rational, FiniteSetQ] = field(default_factory=dict)


@dataclass
class NonelementarityResult:
    bound: int
    witness: PowerCode
    fiber: FiniteSetQ
    fiber_size: int
    complement: IntervalUnion

    @property
    def complement_components(self) -> int:
        return len(self.complement.parts)


class InteriorService:
    """Interiors of definable sets in the product topology, computed in the pure order"""

    def __init__(self, coding: CodingService, wmso: WmsoService, rnf: RnfService,
                 certificate_depth: int = Config.CERTIFICATE_DEPTH):
        self.coding = coding
        self.wmso = wmso
        self.rnf = rnf
        self.certificate_depth = certificate_depth
        self._meets: Dict[OrderCell, Formula] = {}

    # ------------------------------------------------------------ box conditions

    def comp_formula(self, cell: OrderCell, setvars: Optional[Sequence[Var]] = None) -> Formula:
        """Labels compatible with the equalities the cell forces"""
        variables = list(cell.variables)
        if setvars is None:
            setvars = [set_variable(v) for v in variables]
        if len(setvars) != len(variables):
            raise DomainError("one set variable per cell variable is needed")
        label = dict(zip(variables, setvars))
        parts = []
        for block in cell.blocks:
            members = sorted(block.variables, key=lambda v: v.name)
            for a, b in zip(members, members[1:]):
                parts.append(Eq(label[a], label[b]))
            if members and block.parameter is not None:
                parts.append(Eq(label[members[0]], SetLit(self.coding.rho(block.parameter))))
        return conj(*parts)

    def meet_formula(self, cell: OrderCell) -> Formula:
        """Pure-order condition on l_x, u_x for the box to meet the cell"""
        if cell in self._meets:
            return self._meets[cell]
        body = [cell.to_formula()]
        for var in cell.variables:
            body += [Lt(lower_variable(var), var), Lt(var, upper_variable(var)), Lt(var, ZERO)]
        result: Formula = conj(*body)
        for var in reversed(cell.variables):
            result = Exists(var, result)
        result = simplify(eliminate_quantifiers(result))
        self._meets[cell] = result
        return result

    def gamma_formula(self, cell: OrderCell, theta: Formula, positives: Sequence[Var] = (),
                      bounds: Optional[Mapping[Var, Tuple[Optional[Rational], Rational]]] = None) -> Formula:
        """Every compatible labelling and every positive point of the box satisfies theta

        With bounds the box sides are literals (a None lower side means the box
        touches zero); without them they are the variables l_y, u_y.
        """
        if isinstance(theta, Top):
            return TRUE
        if isinstance(theta, Bottom):
            return FALSE
        inside = []
        for var in positives:
            if bounds is None:
                low, high = lower_variable(var), upper_variable(var)
            else:
                low = None if bounds[var][0] is None else Const(bounds[var][0])
                high = Const(bounds[var][1])
            if low is not None:
                inside.append(Lt(low, var))
            inside.append(Lt(var, high))
        body: Formula = imp(conj(self.comp_formula(cell), *inside), theta)
        for var in reversed(list(positives)):
            body = Forall(var, body)
        for var in reversed(cell.variables):
            label = set_variable(var)
            if label in free_variables(body):
                body = Forall(label, body)
        return self.wmso.eliminate_w(body)

    def refine_to_cells(self, rnf: RelativeNormalForm) -> List[Tuple[OrderCell, Formula]]:
        """Every complete cell of the negative coordinates with the theta it carries"""
        negatives = rnf.stratum.variables(Sign.NEG)
        params = sorted({c for chi, _ in rnf.disjuncts for c in constants(chi) if c < 0})
        thetas: Dict[OrderCell, List[Formula]] = {}
        for chi, theta in rnf.disjuncts:
            for cell in dlo_service.decompose_to_cells(chi, negatives, params, Guard.NEG):
                thetas.setdefault(cell, []).append(theta)
        refined = [(cell, disj(*thetas.get(cell, []))) for cell in enumerate_cells(negatives, params, Guard.NEG)]
        logger.debug("refined %d pairs into %d cells on %s", len(rnf.disjuncts), len(refined), rnf.stratum)
        return refined

    def box_subset_formula(self, rnf: RelativeNormalForm) -> Formula:
        """Pure-order condition on the box sides for the box to lie inside the set"""
        positives = rnf.stratum.variables(Sign.POS)
        parts = []
        for cell, theta in self.refine_to_cells(rnf):
            parts.append(imp(self.meet_formula(cell), self.gamma_formula(cell, theta, positives)))
        return simplify(conj(*parts))

    def box_condition_holds(self, rnf: RelativeNormalForm, negative: Sides,
                            positive: Mapping[Var, Tuple[Optional[Rational], Rational]]) -> bool:
        """The box condition at concrete sides; a None lower positive side is zero"""
        env = {}
        for var, (low, high) in negative.items():
            env[lower_variable(var)] = low
            env[upper_variable(var)] = high
        positives = rnf.stratum.variables(Sign.POS)
        for cell, theta in self.refine_to_cells(rnf):
            if not evaluate_order(self.meet_formula(cell), env):
                continue
            gamma = self.gamma_formula(cell, theta, positives, bounds=positive)
            if not dlo_service.evaluate_qf(gamma, {}):
                return False
        return True

    # ------------------------------------------------------------ pointwise interior

    def interior_parameters(self, f: Formula) -> List[Rational]:
        """Constants, zero and the fibers of the negative constants"""
        values = set(constants(f)) | {Rational(0)}
        for c in constants(f):
            if c < 0:
                values |= set(self.coding.rho(c))
        return sorted(values)

    def is_interior_point(self, f: Formula, point: Mapping[Var, Rational]) -> bool:
        """Some box around the point lies inside the set defined by f"""
        variables = sorted_variables(f)
        missing = [v for v in variables if v not in point]
        if missing:
            raise DomainError(f"no value for {[v.name for v in missing]}")
        values = sorted(set(self.interior_parameters(f)) | {Rational(point[v]) for v in variables})
        gaps = [b - a for a, b in zip(values, values[1:])]
        radius = min(gaps) / 4 if gaps else Rational(1)

        choices = []
        for var in variables:
            a = Rational(point[var])
            if a < 0:
                choices.append([Sign.NEG])
            elif a > 0:
                choices.append([Sign.POS])
            else:
                choices.append([Sign.NEG, Sign.ZERO, Sign.POS])
        for signs in product(*choices):
            stratum = SignStratum.of(dict(zip(variables, signs)))
            rnf = self.rnf.to_rnf(f, stratum)
            negative: Sides = {}
            positive: Dict[Var, Tuple[Optional[Rational], Rational]] = {}
            for var, sign in zip(variables, signs):
                a = Rational(point[var])
                if sign == Sign.NEG:
                    negative[var] = (a - radius, a + radius) if a < 0 else (-radius, Rational(0))
                elif sign == Sign.POS:
                    positive[var] = (a - radius, a + radius) if a > 0 else (None, radius)
            if not self.box_condition_holds(rnf, negative, positive):
                logger.debug("box around %s leaves the set on %s", point, stratum)
                return False
        return True

    # ------------------------------------------------------------ interior formulas

    def interior_formula(self, f: Formula, method: str = "cells") -> Formula:
        """Pure-order formula defining the interior of f in ℚⁿ"""
        if method == "cells":
            return self._interior_by_cells(f)
        if method == "qe":
            return self._interior_by_elimination(f)
        raise DomainError(f"unknown interior method {method!r}")

    def _interior_by_cells(self, f: Formula, zero_only: bool = False) -> Formula:
        variables = sorted_variables(f)
        params = self.interior_parameters(f)
        parts = []
        for cell in enumerate_cells(variables, params):
            if zero_only and not any(cell.block_of(v).parameter == 0 for v in variables):
                continue
            if self.is_interior_point(f, cell.representative()):
                parts.append(cell.to_formula())
        logger.debug("interior of %s covers %d cells", f, len(parts))
        return simplify(disj(*parts))

    def _interior_by_elimination(self, f: Formula) -> Formula:
        """Box endpoints quantified over the box condition on each nonzero stratum"""
        variables = sorted_variables(f)
        parts = []
        for signs in product((Sign.NEG, Sign.POS), repeat=len(variables)):
            stratum = SignStratum.of(dict(zip(variables, signs)))
            rnf = self.rnf.to_rnf(f, stratum)
            body = [self.box_subset_formula(rnf)]
            endpoints = []
            for var, sign in zip(variables, signs):
                low, high = lower_variable(var), upper_variable(var)
                endpoints += [low, high]
                body += [Lt(low, var), Lt(var, high)]
                body.append(Lt(high, ZERO) if sign == Sign.NEG else Lt(ZERO, low))
            result: Formula = conj(*body)
            for var in reversed(endpoints):
                result = Exists(var, result)
            parts.append(eliminate_quantifiers(result))
        if variables:
            parts.append(self._interior_by_cells(f, zero_only=True))
        return simplify(disj(*parts))

    def open_set_formula(self, f: Formula) -> Formula:
        """Glue the interiors of the zero-coordinate slices of an open set"""
        witness = self.openness_witness(f)
        if witness is not None:
            raise DomainError(f"{f} is not open: {_format_point(witness)} is not interior")
        variables = sorted_variables(f)
        parts = []
        for size in range(len(variables) + 1):
            for zeros in combinations(variables, size):
                rest = [v for v in variables if v not in zeros]
                sliced = substitute(f, {z: ZERO for z in zeros})
                if free_variables(sliced):
                    inner = self._interior_by_cells(sliced)
                else:
                    inner = TRUE if self.rnf.evaluate_point(sliced, {}) else FALSE
                parts.append(conj(
                    *(Eq(z, ZERO) for z in zeros),
                    *(disj(Lt(v, ZERO), Lt(ZERO, v)) for v in rest),
                    inner,
                ))
        return simplify(disj(*parts))

    # ------------------------------------------------------------ openness

    def label_pool(self, f: Formula, positives=(), limit: int = 6, codable_only: bool = True) -> List[FiniteSetQ]:
        """Small labels worth realizing near a point: empty, singletons, fibers of constants"""
        candidates = [EMPTY_SET]
        singles = sorted(set(positives) | {c for c in constants(f) if c > 0})
        candidates += [FiniteSetQ.of([q]) for q in singles]
        candidates += [self.coding.rho(c) for c in sorted(constants(f)) if c < 0]
        if len(singles) > 1:
            candidates.append(FiniteSetQ.of(singles))
        pool: List[FiniteSetQ] = []
        for label in candidates:
            if label in pool or (codable_only and not self._codable(label)):
                continue
            pool.append(label)
        return pool[:limit]

    def _codable(self, label: FiniteSetQ) -> bool:
        try:
            return self.coding.index_of_set(label) <= self.coding.max_code_bits
        except DomainError:
            logger.warning("label %s skipped: index beyond the search limit", label)
            return False

    def openness_samples(self, f: Formula) -> List[Dict[Var, Rational]]:
        """Cell representatives and relabelled copies of their negative coordinates"""
        variables = sorted_variables(f)
        params = self.interior_parameters(f)
        samples = []
        for cell in enumerate_cells(variables, params):
            rep = cell.representative()
            samples.append(rep)
            moving = sorted({x for x in rep.values() if x < 0 and x not in params})
            if not moving:
                continue
            anchors = sorted(set(params) | set(rep.values()))
            delta = min(b - a for a, b in zip(anchors, anchors[1:])) / 4
            pool = self.label_pool(f, [x for x in rep.values() if x > 0], limit=6 if len(moving) == 1 else 3)
            for labels in product(pool, repeat=len(moving)):
                moved = {x: self.coding.find_labelled(label, x - delta, x + delta) for x, label in zip(moving, labels)}
                samples.append({v: moved.get(x, x) for v, x in rep.items()})
        logger.debug("%d openness samples for %s", len(samples), f)
        return samples

    def openness_witness(self, f: Formula) -> Optional[Dict[Var, Rational]]:
        """A sample point of f outside its interior, if any"""
        interior = self._interior_by_cells(f)
        for sample in self.openness_samples(f):
            if self.rnf.evaluate_point(f, sample) and not evaluate_order(interior, sample):
                return sample
        return None

    def open_core_check(self, f: Formula) -> OpenCoreResult:
        """Openness verdict and interval description of a unary definable set"""
        variables = sorted_variables(f)
        if len(variables) > 1:
            raise DomainError(f"open_core_check needs one free variable, found {[v.name for v in variables]}")
        var = variables[0] if variables else Var("x")
        interior = self._interior_by_cells(f)
        description = describe_unary(interior) if free_variables(interior) <= {var} else None
        if description is None:
            raise DomainError("interior formula escaped the free variable")
        witness_point = self.openness_witness(f)
        witness = certificate = None
        if witness_point is not None:
            witness = witness_point.get(var, Rational(0))
            certificate = self.non_interior_certificate(f, witness_point)
        fibers = {c: self.coding.rho(c) for c in sorted(constants(f)) if c < 0}
        return OpenCoreResult(
            is_open=witness_point is None,
            variable=var,
            interior=interior,
            description=description,
            witness=witness,
            certificate=certificate,
            fibers=fibers,
        )

    # ------------------------------------------------------------ certificates

    def non_interior_certificate(self, f: Formula, point: Mapping[Var, Rational],
                                 depth: Optional[int] = None) -> Certificate:
        """Complement points in every 2^-k box around the point, k up to depth"""
        depth = self.certificate_depth if depth is None else depth
        variables = sorted_variables(f)
        missing = [v for v in variables if v not in point]
        if missing:
            raise DomainError(f"no value for {[v.name for v in missing]}")
        center = {v: Rational(point[v]) for v in variables}
        certificate = Certificate(point=center, depth=depth, found=True)
        for k in range(1, depth + 1):
            witness = self._complement_point(f, center, Rational(1, 2 ** k))
            if witness is None:
                certificate.found = False
                certificate.failed_at = k
                break
            certificate.witnesses.append((k, *witness))
        return certificate

    def _complement_point(self, f: Formula, center: Dict[Var, Rational], radius: Rational) -> Optional[Witness]:
        """A point of the box off the set; labelled coordinates stand for codes near their value"""
        variables = list(center)
        options: Dict[Var, List[Tuple[Rational, Optional[FiniteSetQ]]]] = {
            v: [(x, None) for x in dict.fromkeys([center[v], center[v] - radius / 2, center[v] + radius / 2])]
            for v in variables
        }
        anchors = set(constants(f)) | {Rational(0)} | {x for opts in options.values() for x, _ in opts}
        pool = self.label_pool(f, sorted(x for x in anchors if x > 0), codable_only=False)
        for var in variables:
            low = center[var] - radius / 2
            if low >= 0:
                continue
            high = min(center[var] + radius / 2, Rational(0))
            value = between(low, high)
            while value in anchors:
                value = between(low, value)
            anchors.add(value)
            options[var] += [(value, label) for label in pool]
        for combo in product(*(options[v] for v in variables)):
            point = {v: x for v, (x, _) in zip(variables, combo)}
            labels = {v: label for v, (_, label) in zip(variables, combo) if label is not None}
            if any(point[v] == point[w] for v in labels for w in variables if w != v):
                continue
            if not self.rnf.evaluate_point(f, point, labels):
                return self._materialize(point, labels, anchors)
        return None

    def _materialize(self, point: Dict[Var, Rational], labels: Dict[Var, FiniteSetQ], anchors) -> Witness:
        """Replace labelled coordinates by actual codes when their index is small enough"""
        point, labels = dict(point), dict(labels)
        for var, label in list(labels.items()):
            if not self._codable(label):
                continue
            value = point[var]
            others = [a for a in anchors if a != value]
            gap = min((abs(a - value) for a in others), default=Rational(1)) / 2
            point[var] = self.coding.find_labelled(label, value - gap, min(value + gap, Rational(0)))
            del labels[var]
        return point, labels

    # ------------------------------------------------------------ unbounded finite fibers

    def nonelementarity_report(self, bound: int) -> NonelementarityResult:
        """A code whose fiber outgrows the bound and the convex pieces of its complement"""
        witness = self.coding.unbounded_fiber_witness(bound)
        fiber = self.coding.code_fiber(witness)
        points = list(fiber)
        pieces = [IntervalPart.interval(a, b) for a, b in zip([None] + points, points + [None])]
        return NonelementarityResult(
            bound=bound,
            witness=witness,
            fiber=fiber,
            fiber_size=len(fiber),
            complement=IntervalUnion.normalize(pieces),
        )

    def finite_satisfiability_table(self, bound: int) -> List[NonelementarityResult]:
        """Reports for every N up to the bound: each finite part of the type is realized"""
        return [self.nonelementarity_report(n) for n in range(bound + 1)]


def _format_point(point: Mapping[Var, Rational]) -> str:
    return "(" + ", ".join(f"{v.name}={format_rational(x)}" for v, x in point.items()) + ")"
