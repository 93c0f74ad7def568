import logging
from functools import lru_cache
from itertools import product
from typing import Dict, Iterator, List, Mapping, Optional, Set, Tuple

from src.config import Config
from src.core.errors import DomainError
from src.core.finite_set import EMPTY_SET, FiniteSetQ
from src.core.formula import (
    ATOMS, FALSE, TRUE, A, And, Bottom, Const, Eq, Exists, Forall, Formula, Guard, Imp, In,
    Lt, Not, Or, SetLit, Sort, Term, Top, Var, ZERO, conj, constants, disj, exists,
    free_variables, neg, substitute, walk,
)
from src.core.normal_form import RelativeNormalForm, Sign, SignStratum, sign_of
from src.core.rational import Rational
from src.services import dlo_service
from src.services.coding_service import CodingService
from src.services.dlo_service import nnf, sample_points, simplify
from src.services.wmso_service import WmsoService, finite_set_candidates

logger = logging.getLogger(__name__)

Pair = Tuple[Formula, Formula]

_RANK = {Sign.NEG: 0, Sign.ZERO: 1, Sign.POS: 2}


def set_variable(var: Var) -> Var:
    """Free set variable standing for rho of a negative element variable"""
    return Var(f"S_{var.name}", Sort.SET)


def source_variable(set_var: Var) -> Var:
    return Var(set_var.name[2:])


def _term_sign(term: Term, signs: Mapping[Var, Sign]) -> Optional[Sign]:
    if isinstance(term, Const):
        return sign_of(term.value)
    return signs.get(term)


# ---------------------------------------------------------------- sign decomposition

def fold_sign_atom(f: Formula, signs: Mapping[Var, Sign]) -> Formula:
    """Decide atoms whose truth follows from the signs of their arguments"""
    f = dlo_service.simplify_atom(f)
    if not isinstance(f, ATOMS):
        return f
    left, right = (f.left, f.right)
    a, b = _term_sign(left, signs), _term_sign(right, signs)
    if a is None or b is None:
        return f
    if isinstance(f, A):
        return f if (a, b) == (Sign.NEG, Sign.POS) else FALSE
    if isinstance(f, Lt):
        if a != b:
            return TRUE if _RANK[a] < _RANK[b] else FALSE
        return FALSE if a == Sign.ZERO else f
    if isinstance(f, Eq):
        if a != b:
            return FALSE
        return TRUE if a == Sign.ZERO else f
    return f


def fold_signs(f: Formula, signs: Mapping[Var, Sign]) -> Formula:
    if isinstance(f, ATOMS):
        return fold_sign_atom(f, signs)
    if isinstance(f, Not):
        return neg(fold_signs(f.body, signs))
    if isinstance(f, And):
        return conj(*(fold_signs(a, signs) for a in f.args))
    if isinstance(f, Or):
        return disj(*(fold_signs(a, signs) for a in f.args))
    if isinstance(f, Imp):
        return simplify(Imp(fold_signs(f.left, signs), fold_signs(f.right, signs)))
    if isinstance(f, (Exists, Forall)):
        inner = dict(signs)
        inner[f.var] = Sign.NEG if f.guard == Guard.NEG else Sign.POS
        return type(f)(f.var, fold_signs(f.body, inner), f.guard)
    return f


def specialize(f: Formula, stratum: SignStratum) -> Formula:
    """Substitute zero variables, split unguarded quantifiers by sign, fold decided atoms"""
    signs = stratum.as_dict()
    zeros = {var: ZERO for var, sign in signs.items() if sign == Sign.ZERO}
    g = substitute(f, zeros) if zeros else f
    live = {var: sign for var, sign in signs.items() if sign != Sign.ZERO}
    return simplify(_specialize(g, live))


def _specialize(f: Formula, signs: Dict[Var, Sign]) -> Formula:
    if isinstance(f, ATOMS):
        return fold_sign_atom(f, signs)
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Not):
        return neg(_specialize(f.body, signs))
    if isinstance(f, And):
        return conj(*(_specialize(a, signs) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_specialize(a, signs) for a in f.args))
    if isinstance(f, Imp):
        return simplify(Imp(_specialize(f.left, signs), _specialize(f.right, signs)))
    var, body = f.var, f.body
    if f.guard is not None:
        inner = {**signs, var: Sign.NEG if f.guard == Guard.NEG else Sign.POS}
        return type(f)(var, _specialize(body, inner), f.guard)
    branches = [
        type(f)(var, _specialize(body, {**signs, var: Sign.NEG}), Guard.NEG),
        _specialize(substitute(body, {var: ZERO}), signs),
        type(f)(var, _specialize(body, {**signs, var: Sign.POS}), Guard.POS),
    ]
    return disj(*branches) if isinstance(f, Exists) else conj(*branches)


def sign_decompose(f: Formula) -> List[Tuple[SignStratum, Formula]]:
    """One specialized formula per sign assignment to the free variables"""
    variables = sorted(free_variables(f), key=lambda v: v.name)
    result = [(stratum, specialize(f, stratum)) for stratum in SignStratum.all_for(variables)]
    logger.debug("sign decomposition into %d strata", len(result))
    return result


# ---------------------------------------------------------------- the normal form

class RnfService:
    """Relative normal forms and evaluation in the expansion of the rational order by A"""

    def __init__(self, coding: CodingService, wmso: WmsoService, cache_size: int = Config.CACHE_SIZE):
        self.coding = coding
        self.wmso = wmso
        self._cached_normal_form = lru_cache(maxsize=cache_size)(self._normal_form)

    def set_term(self, term: Term) -> Term:
        if isinstance(term, Const):
            return SetLit(self.coding.rho(term.value))
        return set_variable(term)

    # ------------------------------------------------------------ translation

    def to_rnf(self, f: Formula, stratum: SignStratum) -> RelativeNormalForm:
        """Disjunction of (chi, theta) pairs equivalent to f on the stratum"""
        return self._cached_normal_form(f, stratum)

    def _normal_form(self, f: Formula, stratum: SignStratum) -> RelativeNormalForm:
        missing = free_variables(f) - {var for var, _ in stratum.signs}
        if missing:
            raise DomainError(f"stratum does not sign {sorted(v.name for v in missing)}")
        g = nnf(specialize(f, stratum))
        signs = {var: sign for var, sign in stratum.signs if sign != Sign.ZERO}
        pairs = self._translate(g, signs)
        rnf = RelativeNormalForm(stratum, tuple(pairs))
        logger.debug("normal form on %s has %d disjuncts", stratum, len(pairs))
        return rnf

    def _translate(self, f: Formula, signs: Dict[Var, Sign]) -> List[Pair]:
        if isinstance(f, Top):
            return [(TRUE, TRUE)]
        if isinstance(f, Bottom):
            return []
        if isinstance(f, ATOMS):
            return self._atom(f, signs)
        if isinstance(f, Not):
            return self._negate(self._atom(f.body, signs))
        if isinstance(f, Or):
            pairs: List[Pair] = []
            for arg in f.args:
                pairs.extend(self._translate(arg, signs))
            return self._merge(pairs)
        if isinstance(f, And):
            pairs = [(TRUE, TRUE)]
            for arg in f.args:
                pairs = self._product(pairs, self._translate(arg, signs))
                if not pairs:
                    break
            return pairs
        if isinstance(f, Forall):
            dual = Exists(f.var, nnf(f.body, negate=True), f.guard)
            return self._negate(self._translate(dual, signs))
        inner = {**signs, f.var: Sign.NEG if f.guard == Guard.NEG else Sign.POS}
        body = self._translate(f.body, inner)
        if f.guard == Guard.POS:
            return self._merge([(chi, exists(f.var, theta)) for chi, theta in body])
        return self._exists_negative(f.var, body, inner)

    def _atom(self, f: Formula, signs: Dict[Var, Sign]) -> List[Pair]:
        f = fold_sign_atom(f, signs)
        if isinstance(f, Top):
            return [(TRUE, TRUE)]
        if isinstance(f, Bottom):
            return []
        if isinstance(f, A):
            if isinstance(f.right, Const):
                if isinstance(f.left, Const):
                    return [(TRUE, TRUE)] if self.coding.eval_A(f.left.value, f.right.value) else []
            member = In(f.right, self.set_term(f.left))
            return [(TRUE, self.wmso.expand_atom(member))]
        side = _term_sign(f.left, signs)
        if side == Sign.NEG:
            return [(f, TRUE)]
        return [(TRUE, f)]

    def _product(self, left: List[Pair], right: List[Pair]) -> List[Pair]:
        pairs = []
        for (chi1, theta1), (chi2, theta2) in product(left, right):
            chi, theta = simplify(conj(chi1, chi2)), simplify(conj(theta1, theta2))
            if not isinstance(chi, Bottom) and not isinstance(theta, Bottom):
                pairs.append((chi, theta))
        return self._merge(pairs)

    def _negate(self, pairs: List[Pair]) -> List[Pair]:
        """¬∨(χ ∧ Θ) as ∧(¬χ ∨ ¬Θ), distributed back into pairs"""
        result = [(TRUE, TRUE)]
        for chi, theta in pairs:
            options = []
            if not isinstance(chi, Top):
                options.append((nnf(chi, negate=True), TRUE))
            if not isinstance(theta, Top):
                options.append((TRUE, nnf(theta, negate=True)))
            result = self._product(result, [o for o in options if not isinstance(o[0], Bottom) and not isinstance(o[1], Bottom)])
            if not result:
                break
        return result

    def _merge(self, pairs: List[Pair]) -> List[Pair]:
        """Group disjuncts by theta and decide closed thetas"""
        grouped: Dict[Formula, List[Formula]] = {}
        for chi, theta in pairs:
            chi, theta = simplify(chi), simplify(theta)
            if not free_variables(theta) and not isinstance(theta, (Top, Bottom)):
                theta = self._decide_closed(theta)
            if isinstance(chi, Bottom) or isinstance(theta, Bottom):
                continue
            grouped.setdefault(theta, []).append(chi)
        merged = [(simplify(disj(*chis)), theta) for theta, chis in grouped.items()]
        return [(chi, theta) for chi, theta in merged if not isinstance(chi, Bottom)]

    def _decide_closed(self, theta: Formula) -> Formula:
        return TRUE if self.wmso.eval_wformula(theta, {}) else FALSE

    def _exists_negative(self, t: Var, body: List[Pair], signs: Dict[Var, Sign]) -> List[Pair]:
        """Negative quantifier: cells forcing t onto a variable, onto a parameter, or into an open gap"""
        s_t = set_variable(t)
        pairs: List[Pair] = []
        for chi, theta in body:
            in_chi = t in free_variables(chi)
            in_theta = s_t in free_variables(theta)
            if not in_chi and not in_theta:
                pairs.append((chi, theta))
                continue
            if not in_theta:
                pairs.append((self._project(t, chi, signs), theta))
                continue
            if not in_chi:
                pairs.append((chi, Exists(s_t, theta)))
                continue
            pairs.extend(self._cases(t, chi, theta, signs))
        return self._merge(pairs)

    def _project(self, t: Var, chi: Formula, signs: Dict[Var, Sign]) -> Formula:
        projected = dlo_service.eliminate_exists(t, nnf(chi), Guard.NEG)
        return simplify(fold_signs(projected, signs))

    def _cases(self, t: Var, chi: Formula, theta: Formula, signs: Dict[Var, Sign]) -> List[Pair]:
        s_t = set_variable(t)
        negatives = {v for v in free_variables(chi) if signs.get(v) == Sign.NEG}
        negatives |= {v for v, s in signs.items() if s == Sign.NEG and set_variable(v) in free_variables(theta)}
        variables = [t] + sorted(negatives - {t}, key=lambda v: v.name)
        params = sorted(c for c in constants(chi) if c < 0)
        pairs: List[Pair] = []
        cells = dlo_service.decompose_to_cells(chi, variables, params, ambient=Guard.NEG)
        for cell in cells:
            block = cell.block_of(t)
            delta = cell.to_formula()
            others = sorted(block.variables - {t}, key=lambda v: v.name)
            if others:
                x_j = others[0]
                pairs.append((simplify(substitute(delta, {t: x_j})), substitute(theta, {s_t: set_variable(x_j)})))
            elif block.parameter is not None:
                c = block.parameter
                literal = SetLit(self.coding.rho(c))
                pairs.append((simplify(substitute(delta, {t: Const(c)})), self._expand(substitute(theta, {s_t: literal}))))
            else:
                pi = self._project(t, delta, signs)
                pairs.append((pi, Exists(s_t, theta)))
        logger.debug("negative quantifier over %s split into %d cells", t, len(cells))
        return pairs

    def _expand(self, theta: Formula) -> Formula:
        return simplify(self.wmso.expand_literals(nnf(theta)))

    # ------------------------------------------------------------ evaluation

    def evaluate_point(self, f: Formula, point: Mapping[Var, Rational],
                       labels: Optional[Mapping[Var, FiniteSetQ]] = None) -> bool:
        """Truth at a point through the normal form of its stratum

        labels gives negative coordinates a fiber other than rho of their value;
        the point then stands for a code with that fiber in the same order cell.
        """
        free = free_variables(f)
        missing = free - set(point)
        if missing:
            raise DomainError(f"no value for {sorted(v.name for v in missing)}")
        local = {v: Rational(point[v]) for v in free}
        rnf = self.to_rnf(f, SignStratum.of_point(local))
        return self.evaluate_rnf(rnf, local, labels)

    def evaluate_rnf(self, rnf: RelativeNormalForm, point: Mapping[Var, Rational],
                     labels: Optional[Mapping[Var, FiniteSetQ]] = None) -> bool:
        labels = labels or {}
        for chi, theta in rnf.disjuncts:
            if not dlo_service.evaluate_order(chi, point):
                continue
            env = {}
            for var in free_variables(theta):
                if var.sort == Sort.SET:
                    source = source_variable(var)
                    env[var] = labels[source] if source in labels else self.coding.rho(point[source])
                else:
                    env[var] = point[var]
            if self.wmso.eval_wformula(theta, env):
                return True
        return False

    def same_fiber_definable(self, x: Rational, x_prime: Rational) -> bool:
        """x ∼ x' through ∀y>0 (A(x,y) ↔ A(x',y))"""
        if x >= 0 or x_prime >= 0:
            raise DomainError("same_fiber compares negative rationals")
        u, v, y = Var("u"), Var("v"), Var("y")
        formula = Forall(y, And((Imp(A(u, y), A(v, y)), Imp(A(v, y), A(u, y)))), Guard.POS)
        return self.evaluate_point(formula, {u: x, v: x_prime})

    # ------------------------------------------------------------ direct semantics

    def evaluate_semantic(self, f: Formula, point: Mapping[Var, Rational]) -> bool:
        """Reference evaluator: negatives carry labels, quantifiers range over finitely many types"""
        env = {}
        for var in free_variables(f):
            value = Rational(point[var])
            env[var] = (value, self.coding.fiber(value))
        return self._semantic(f, env)

    def _semantic(self, f: Formula, env: Dict[Var, Tuple[Rational, FiniteSetQ]]) -> bool:
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Not):
            return not self._semantic(f.body, env)
        if isinstance(f, And):
            return all(self._semantic(a, env) for a in f.args)
        if isinstance(f, Or):
            return any(self._semantic(a, env) for a in f.args)
        if isinstance(f, Imp):
            return (not self._semantic(f.left, env)) or self._semantic(f.right, env)
        if isinstance(f, ATOMS):
            left, right = (self._value(f.left, env), self._value(f.right, env))
            if isinstance(f, Lt):
                return left[0] < right[0]
            if isinstance(f, Eq):
                return left[0] == right[0]
            return left[0] < 0 < right[0] and right[0] in left[1]
        results = (self._semantic(f.body, {**env, f.var: c}) for c in self._candidates(f, env))
        return any(results) if isinstance(f, Exists) else all(results)

    def _value(self, term: Term, env) -> Tuple[Rational, FiniteSetQ]:
        if isinstance(term, Const):
            return term.value, self.coding.fiber(term.value)
        return env[term]

    def _candidates(self, f: Formula, env) -> Iterator[Tuple[Rational, FiniteSetQ]]:
        body_consts = constants(f.body)
        scope = {v: env[v] for v in free_variables(f)}
        negatives = {value for value, _ in scope.values() if value < 0} | {c for c in body_consts if c < 0}
        positives = {value for value, _ in scope.values() if value > 0} | {c for c in body_consts if c > 0}
        for _, label in scope.values():
            positives |= set(label)
        for c in body_consts:
            if c < 0:
                positives |= set(self.coding.rho(c))
        if f.guard in (None, Guard.POS):
            for p in sample_points(positives, Guard.POS):
                yield p, EMPTY_SET
        if f.guard is None:
            yield Rational(0), EMPTY_SET
        if f.guard in (None, Guard.NEG):
            known = {value: label for value, label in scope.values() if value < 0}
            labels = None
            for p in sample_points(negatives, Guard.NEG):
                if p in known:
                    yield p, known[p]
                elif p in negatives:
                    yield p, self.coding.rho(p)
                else:
                    if labels is None:
                        labels = self._label_candidates(f, scope, positives)
                    for label in labels:
                        yield p, label

    def _label_candidates(self, f: Formula, scope, positives: Set[Rational]) -> List[FiniteSetQ]:
        """Labels distinguishable by the body: subsets of the relevant positives plus fresh points"""
        var = f.var
        direct: Set[Rational] = set()
        bound_members: Set[Var] = set()
        bound_here = {node.var for node in walk(f.body) if isinstance(node, (Exists, Forall))}
        for node in walk(f.body):
            if isinstance(node, A) and node.left == var:
                if isinstance(node.right, Const):
                    direct.add(node.right.value)
                elif node.right in bound_here:
                    bound_members.add(node.right)
                elif node.right in scope:
                    direct.add(scope[node.right][0])
        if bound_members:
            relevant = sorted(positives)
        else:
            relevant = sorted(v for v in direct if v > 0)
        return finite_set_candidates(relevant, positives, len(bound_members))
