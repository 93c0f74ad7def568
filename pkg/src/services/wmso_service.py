import logging
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Collection, Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from src.config import Config
from src.core.errors import AnchorLimitExceeded, DomainError, FragmentViolation
from src.core.finite_set import FiniteSetQ
from src.core.formula import (
    ATOMS, FALSE, TRUE, And, Bottom, Const, Eq, Exists, Forall, Formula, Guard, In, Lt, Not, Or,
    SetLit, Sort, Term, Top, Var, ZERO, conj, constants, disj, free_variables, set_literals,
    substitute, term_sort, walk,
)
from src.core.normal_form import MembershipPattern
from src.core.rational import Rational
from src.services import dlo_service
from src.services.dlo_service import dnf, evaluate_qf, nnf, sample_points, simplify, simplify_atom

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------- finite-set algebra

def set_union(left: FiniteSetQ, right: FiniteSetQ) -> FiniteSetQ:
    return FiniteSetQ.of(set(left) | set(right))


def set_intersection(left: FiniteSetQ, right: FiniteSetQ) -> FiniteSetQ:
    return FiniteSetQ.of(set(left) & set(right))


def set_min(values: FiniteSetQ) -> FiniteSetQ:
    """Singleton of the minimum; the empty set is fixed"""
    return FiniteSetQ.of(values.elements[:1])


def set_max(values: FiniteSetQ) -> FiniteSetQ:
    return FiniteSetQ.of(values.elements[-1:])


def s_preimage(domain: FiniteSetQ, target: FiniteSetQ) -> FiniteSetQ:
    """Elements of domain whose successor inside domain lies in target"""
    items = domain.elements
    return FiniteSetQ.of(a for a, successor in zip(items, items[1:]) if successor in target)


# ---------------------------------------------------------------- normalization

def _push(kind, var: Var, body: Formula, guard: Optional[Guard]) -> Formula:
    """Move one quantifier as far inside its body as the connectives allow"""
    if var not in free_variables(body):
        return body
    distributes = Or if kind is Exists else And
    splits = And if kind is Exists else Or
    combine = disj if distributes is Or else conj
    if isinstance(body, distributes):
        return combine(*(_push(kind, var, arg, guard) for arg in body.args))
    if isinstance(body, splits):
        outside = [a for a in body.args if var not in free_variables(a)]
        inside = [a for a in body.args if var in free_variables(a)]
        if outside:
            keep = conj if splits is And else disj
            inner = inside[0] if len(inside) == 1 else splits(tuple(inside))
            return keep(*outside, _push(kind, var, inner, guard))
        return kind(var, body, guard)
    if isinstance(body, kind) and var.sort == Sort.SET and body.var.sort == Sort.ELEM:
        return kind(body.var, _push(kind, var, body.body, guard), body.guard)
    return kind(var, body, guard)


def miniscope(f: Formula) -> Formula:
    if isinstance(f, And):
        return conj(*(miniscope(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(miniscope(a) for a in f.args))
    if isinstance(f, (Exists, Forall)):
        return _push(type(f), f.var, miniscope(f.body), f.guard)
    return f


def normalize_w(f: Formula) -> Formula:
    """Negation normal form, miniscoped, set quantifiers inside like element quantifiers"""
    return miniscope(nnf(f))


def check_fragment(f: Formula, parameters: Collection[Var] = ()) -> Formula:
    """Reject element quantifiers whose variable meets a free set

    Set variables listed as parameters are instantiated by literals before any
    elimination, so memberships in them are accepted. Sets bound anywhere in the
    formula may be met by any element quantifier in their scope.
    """
    normalized = normalize_w(f)
    loose = {v for v in free_variables(normalized) if v.sort == Sort.SET} - set(parameters)
    for node in walk(normalized):
        if not isinstance(node, (Exists, Forall)) or node.var.sort != Sort.ELEM:
            continue
        for atom in walk(node.body):
            if isinstance(atom, In) and atom.elem == node.var and atom.set_term in loose:
                raise FragmentViolation(f"element quantifier over {node.var} meets the free set {atom.set_term}", str(atom))
    return normalized


def touching_quantifiers(var: Var, body: Formula) -> int:
    """Element quantifiers in body whose scope mentions var, counted through sets equated with var"""
    count = 0
    for node in walk(body):
        if not isinstance(node, (Exists, Forall)) or var not in free_variables(node):
            continue
        if node.var.sort == Sort.ELEM:
            count += 1
        elif any(isinstance(a, Eq) and {a.left, a.right} == {var, node.var} for a in walk(node.body)):
            count += touching_quantifiers(node.var, node.body)
    return count


def parameter_bound(f: Formula) -> Set[Rational]:
    """E: element literals together with the elements of set literals"""
    values = set(constants(f))
    for literal in set_literals(f):
        values |= set(literal)
    return values


def fresh_fillings(anchors: Collection[Rational], count: int) -> List[Tuple[Rational, ...]]:
    """Every way to drop up to count new positive points into the gaps between the anchors"""
    ordered = sorted(a for a in set(anchors) if a > 0)
    gaps = [(ordered[i - 1] if i else Rational(0), ordered[i] if i < len(ordered) else None)
            for i in range(len(ordered) + 1)]
    fillings: List[Tuple[Rational, ...]] = [()]
    for size in range(1, count + 1):
        for choice in combinations_with_replacement(range(len(gaps)), size):
            points = []
            for gap_index in sorted(set(choice)):
                low, high = gaps[gap_index]
                k = choice.count(gap_index)
                points += [low + i if high is None else low + i * (high - low) / (k + 1) for i in range(1, k + 1)]
            fillings.append(tuple(points))
    return fillings


def finite_set_candidates(relevant: Collection[Rational], anchors: Collection[Rational],
                          fresh_count: int) -> List[FiniteSetQ]:
    """Subsets of the relevant values, each joined with every filling of fresh points"""
    fillings = fresh_fillings(anchors, fresh_count)
    items = sorted(relevant)
    return [
        FiniteSetQ.of(subset + fresh)
        for size in range(len(items) + 1)
        for subset in combinations(items, size)
        for fresh in fillings
    ]


# ---------------------------------------------------------------- patterns

def realize_pattern(pattern: MembershipPattern, values: Mapping[Term, Rational]) -> Dict[Term, FiniteSetQ]:
    """Concrete finite sets with exactly the pattern's memberships on the valued elements"""
    valued = [values[e] if isinstance(e, Var) else e.value for e in pattern.elements]
    for i, j in combinations(range(len(valued)), 2):
        if valued[i] == valued[j] and pattern.bits[i] != pattern.bits[j]:
            raise DomainError("pattern separates equal elements")
    result = {}
    for column, set_term in enumerate(pattern.sets):
        result[set_term] = FiniteSetQ.of(v for v, row in zip(valued, pattern.bits) if row[column])
    return result


class WmsoService:
    """Decision and elimination for the weak monadic structure of finite sets of positive rationals"""

    def __init__(self, anchor_limit: int = Config.ANCHOR_LIMIT, cache_size: int = Config.CACHE_SIZE):
        self.anchor_limit = anchor_limit
        self._cached_elimination = lru_cache(maxsize=cache_size)(self._eliminate_w)

    def consistent_patterns(self, elements: Sequence[Term], sets: Sequence[Term],
                            values: Mapping[Term, Rational]) -> Iterator[MembershipPattern]:
        if len(elements) > self.anchor_limit:
            raise AnchorLimitExceeded(f"{len(elements)} anchors exceed the limit {self.anchor_limit}")
        valued = {e: (values[e] if isinstance(e, Var) else e.value) for e in elements}
        equal = [(a, b) for a, b in combinations(elements, 2) if valued[a] == valued[b]]
        for pattern in MembershipPattern.enumerate(elements, sets):
            if pattern.is_consistent(equal_elements=equal):
                yield pattern

    # ------------------------------------------------------------ elimination

    def eliminate_w(self, f: Formula) -> Formula:
        """Quantifier-free equivalent: order atoms plus memberships in free set variables"""
        return self._cached_elimination(f)

    def _eliminate_w(self, f: Formula) -> Formula:
        normalized = check_fragment(f)
        result = simplify(self._fold_positive(self._eliminate(normalized)))
        bound = parameter_bound(f)
        stray = constants(result) - bound
        if stray:
            raise DomainError(f"eliminated formula carries parameters outside E: {sorted(stray)}")
        logger.debug("eliminate_w: %s -> %s", f, result)
        return result

    def _eliminate(self, f: Formula) -> Formula:
        if isinstance(f, (Top, Bottom)):
            return f
        if isinstance(f, ATOMS):
            return self.expand_atom(f)
        if isinstance(f, Not):
            return nnf(self.expand_atom(f.body), negate=True)
        if isinstance(f, And):
            return conj(*(self._eliminate(a) for a in f.args))
        if isinstance(f, Or):
            return disj(*(self._eliminate(a) for a in f.args))
        if f.var.sort == Sort.SET and touching_quantifiers(f.var, f.body):
            return self._decide_by_cells(f)
        body = self._eliminate(f.body)
        if f.var.sort == Sort.SET:
            if isinstance(f, Exists):
                return self._exists_set(f.var, body)
            return nnf(self._exists_set(f.var, nnf(body, negate=True)), negate=True)
        if isinstance(f, Exists):
            return self._exists_element(f.var, body)
        return nnf(self._exists_element(f.var, nnf(body, negate=True)), negate=True)

    def _decide_by_cells(self, f: Formula) -> Formula:
        """A set quantifier met by bound elements, decided on each positive cell of its free elements

        Order automorphisms fixing the parameters carry finite sets to finite sets,
        so the truth of f is constant on every cell.
        """
        free = free_variables(f)
        loose = sorted(v.name for v in free if v.sort == Sort.SET)
        if loose:
            raise FragmentViolation(f"set quantifier over {f.var} shares element scopes with free sets {loose}", str(f))
        variables = sorted(free, key=lambda v: v.name)
        params = sorted(v for v in parameter_bound(f) if v > 0)
        cells = dlo_service.enumerate_cells(variables, params, ambient=Guard.POS)
        holding = [cell for cell in cells if self._vs(f, dict(cell.representative()))]
        logger.debug("set quantifier over %s holds on %d of %d cells", f.var, len(holding), len(cells))
        return dlo_service.cells_formula(holding)

    def expand_atom(self, f: Formula) -> Formula:
        """Membership in a literal becomes a disjunction of equalities"""
        f = simplify_atom(f)
        if isinstance(f, In) and isinstance(f.set_term, SetLit):
            return disj(*(simplify_atom(Eq(f.elem, Const(c))) for c in f.set_term.elements))
        if isinstance(f, Eq) and term_sort(f.left) == Sort.SET:
            if isinstance(f.left, SetLit) and isinstance(f.right, SetLit):
                return TRUE if f.left == f.right else FALSE
        return f

    def expand_literals(self, f: Formula) -> Formula:
        if isinstance(f, ATOMS):
            return self.expand_atom(f)
        if isinstance(f, Not):
            return nnf(self.expand_literals(f.body), negate=True)
        if isinstance(f, And):
            return conj(*(self.expand_literals(a) for a in f.args))
        if isinstance(f, Or):
            return disj(*(self.expand_literals(a) for a in f.args))
        return f

    def _exists_element(self, var: Var, body: Formula) -> Formula:
        for node in walk(body):
            if isinstance(node, In) and node.elem == var:
                raise FragmentViolation(f"membership of bound element {var} survives set elimination", str(node))
        result = dlo_service.eliminate_exists(var, nnf(body), Guard.POS)
        return self._fold_positive(result)

    def _exists_set(self, var: Var, body: Formula) -> Formula:
        parts = [self._exists_set_conjunction(var, lits) for lits in dnf(nnf(body))]
        return simplify(disj(*parts))

    def _exists_set_conjunction(self, var: Var, literals: Tuple[Formula, ...]) -> Formula:
        for lit in literals:
            if isinstance(lit, Eq) and var in (lit.left, lit.right) and lit.left != lit.right:
                other = lit.right if lit.left == var else lit.left
                return self.expand_literals(simplify(conj(*(substitute(x, {var: other}) for x in literals))))
        members: List[Term] = []
        non_members: List[Term] = []
        rest: List[Formula] = []
        for lit in literals:
            if var not in free_variables(lit):
                rest.append(lit)
            elif isinstance(lit, In):
                members.append(lit.elem)
            elif isinstance(lit, Not) and isinstance(lit.body, In):
                non_members.append(lit.body.elem)
            elif isinstance(lit, Not) and isinstance(lit.body, Eq):
                # a fresh element outside every anchor separates the sets
                continue
            else:
                raise FragmentViolation(f"unsupported literal on set variable {var}", str(lit))
        anchors = set(members) | set(non_members)
        if len(anchors) > self.anchor_limit:
            raise AnchorLimitExceeded(f"{len(anchors)} anchors on {var} exceed the limit {self.anchor_limit}")
        separations = [nnf(Eq(p, n), negate=True) for p in members for n in non_members]
        return conj(*rest, *separations)

    def _fold_positive(self, f: Formula) -> Formula:
        """Every element of the structure is positive"""
        if isinstance(f, Lt):
            if f.right == ZERO and f.left != ZERO:
                return FALSE
            if f.left == ZERO and f.right != ZERO:
                return TRUE
            return simplify_atom(f)
        if isinstance(f, Eq) and ZERO in (f.left, f.right) and f.left != f.right:
            return FALSE
        if isinstance(f, Not):
            return nnf(self._fold_positive(f.body), negate=True)
        if isinstance(f, And):
            return conj(*(self._fold_positive(a) for a in f.args))
        if isinstance(f, Or):
            return disj(*(self._fold_positive(a) for a in f.args))
        return f

    # ------------------------------------------------------------ evaluation

    @staticmethod
    def _check_env(env: Mapping[Var, object]):
        for var, value in env.items():
            if var.sort == Sort.ELEM and not (isinstance(value, Rational) and value > 0):
                raise DomainError(f"element variable {var} needs a positive rational")
            if var.sort == Sort.SET and not isinstance(value, FiniteSetQ):
                raise DomainError(f"set variable {var} needs a finite set")

    def instantiate(self, f: Formula, env: Mapping[Var, object]) -> Formula:
        """Replace free variables by literals of their values"""
        self._check_env(env)
        missing = free_variables(f) - set(env)
        if missing:
            raise DomainError(f"no value for {sorted(v.name for v in missing)}")
        bindings = {
            var: (SetLit(value) if var.sort == Sort.SET else Const(value))
            for var, value in env.items() if var in free_variables(f)
        }
        return substitute(f, bindings)

    def eval_wformula(self, f: Formula, env: Mapping[Var, object]) -> bool:
        """Truth in the structure, decided by elimination"""
        closed = self.instantiate(f, env)
        return evaluate_qf(self.eliminate_w(closed), {})

    def vs_evaluate(self, f: Formula, env: Mapping[Var, object]) -> bool:
        """Independent decision by recursion over finitely many candidate witnesses"""
        self._check_env(env)
        parameters = [v for v in env if v.sort == Sort.SET]
        return self._vs(check_fragment(f, parameters), dict(env))

    def _vs(self, f: Formula, env: Dict[Var, object]) -> bool:
        if isinstance(f, (Exists, Forall)):
            candidates = self._element_candidates(f, env) if f.var.sort == Sort.ELEM else self._set_candidates(f, env)
            results = (self._vs(f.body, {**env, f.var: c}) for c in candidates)
            return any(results) if isinstance(f, Exists) else all(results)
        if isinstance(f, Not):
            return not self._vs(f.body, env)
        if isinstance(f, And):
            return all(self._vs(a, env) for a in f.args)
        if isinstance(f, Or):
            return any(self._vs(a, env) for a in f.args)
        return evaluate_qf(f, env)

    def _anchors(self, f: Formula, env: Mapping[Var, object], with_sets: bool) -> Set[Rational]:
        values = parameter_bound(f)
        for var in free_variables(f):
            value = env[var]
            if var.sort == Sort.ELEM:
                values.add(value)
            elif with_sets:
                values |= set(value)
        return values

    def _element_candidates(self, f: Formula, env: Mapping[Var, object]) -> List[Rational]:
        return sample_points(self._anchors(f, env, with_sets=True), Guard.POS)

    def _set_candidates(self, f: Formula, env: Mapping[Var, object]) -> List[FiniteSetQ]:
        """Finite sets the body cannot tell apart from some listed one

        A set no bound element meets matters only through its direct members and one
        outside point; otherwise every anchor matters and each element quantifier
        meeting it may ask for one more point in some gap.
        """
        var = f.var
        known = self._anchors(f, env, with_sets=True)
        touching = touching_quantifiers(var, f.body)
        if touching:
            relevant = {v for v in known if v > 0}
        else:
            relevant = set()
            for node in walk(f.body):
                if isinstance(node, In) and node.set_term == var and not isinstance(node.elem, SetLit):
                    if isinstance(node.elem, Const):
                        relevant.add(node.elem.value)
                    elif node.elem in env:
                        relevant.add(env[node.elem])
        if len(relevant) + touching > self.anchor_limit:
            raise AnchorLimitExceeded(f"{len(relevant) + touching} anchors on {var} exceed the limit {self.anchor_limit}")
        candidates = set(finite_set_candidates(relevant, known, max(1, touching)))
        candidates |= {env[v] for v in free_variables(f) if v.sort == Sort.SET}
        candidates |= set(set_literals(f))
        return sorted(candidates, key=lambda s: (len(s), s.elements))

