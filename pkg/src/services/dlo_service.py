import logging
from itertools import product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from src.core.cell import Block, IntervalPart, IntervalUnion, OrderCell
from src.core.errors import DomainError
from src.core.formula import (
    ATOMS, FALSE, TRUE, A, And, Bottom, Const, Eq, Exists, Forall, Formula, Guard, Imp, In,
    Lt, Not, Or, Sort, Term, Top, Var, ZERO, conj, constants, disj, free_variables,
    is_quantifier_free, neg, substitute, term_key, term_sort, walk,
)
from src.core.rational import Rational, between

logger = logging.getLogger(__name__)

Literal = Formula
Env = Mapping[Var, object]


# ---------------------------------------------------------------- simplification

def _orient(f: Eq) -> Eq:
    if term_key(f.right) < term_key(f.left):
        return Eq(f.right, f.left)
    return f


def simplify_atom(f: Formula) -> Formula:
    """Fold order atoms between literals and between identical terms"""
    if isinstance(f, Lt):
        if f.left == f.right:
            return FALSE
        if isinstance(f.left, Const) and isinstance(f.right, Const):
            return TRUE if f.left.value < f.right.value else FALSE
        return f
    if isinstance(f, Eq):
        if f.left == f.right:
            return TRUE
        if isinstance(f.left, Const) and isinstance(f.right, Const):
            return FALSE
        if term_sort(f.left) == Sort.SET and not isinstance(f.left, Var) and not isinstance(f.right, Var):
            return TRUE if f.left == f.right else FALSE
        return _orient(f)
    return f


def simplify(f: Formula) -> Formula:
    """Constant folding and flattening; quantifiers over unused variables are dropped"""
    if isinstance(f, ATOMS):
        return simplify_atom(f)
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Not):
        return neg(simplify(f.body))
    if isinstance(f, And):
        return conj(*(simplify(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(simplify(a) for a in f.args))
    if isinstance(f, Imp):
        left, right = simplify(f.left), simplify(f.right)
        if isinstance(left, Bottom) or isinstance(right, Top):
            return TRUE
        if isinstance(left, Top):
            return right
        if isinstance(right, Bottom):
            return neg(left)
        return Imp(left, right)
    body = simplify(f.body)
    if f.var not in free_variables(body):
        return body
    return type(f)(f.var, body, f.guard)


# ---------------------------------------------------------------- negation normal form

def is_order_atom(f: Formula) -> bool:
    return isinstance(f, Lt) or (isinstance(f, Eq) and term_sort(f.left) == Sort.ELEM)


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form; negated order atoms become positive disjunctions"""
    if isinstance(f, Top):
        return FALSE if negate else TRUE
    if isinstance(f, Bottom):
        return TRUE if negate else FALSE
    if isinstance(f, ATOMS):
        f = simplify_atom(f)
        if not isinstance(f, ATOMS):
            return nnf(f, negate)
        if not negate:
            return f
        if isinstance(f, Lt):
            return disj(simplify_atom(Lt(f.right, f.left)), simplify_atom(Eq(f.left, f.right)))
        if is_order_atom(f):
            return disj(simplify_atom(Lt(f.left, f.right)), simplify_atom(Lt(f.right, f.left)))
        return Not(f)
    if isinstance(f, Not):
        return nnf(f.body, not negate)
    if isinstance(f, Imp):
        return nnf(Or((Not(f.left), f.right)), negate)
    if isinstance(f, (And, Or)):
        parts = [nnf(a, negate) for a in f.args]
        if isinstance(f, And) != negate:
            return conj(*parts)
        return disj(*parts)
    body = nnf(f.body, negate)
    flipped = isinstance(f, Exists) == negate
    kind = Forall if flipped else Exists
    if f.var not in free_variables(body):
        return body
    return kind(f.var, body, f.guard)


# ---------------------------------------------------------------- consistency of literal sets

class _UnionFind:
    def __init__(self):
        self.parent: Dict[object, object] = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def order_consistent(literals: Iterable[Literal]) -> bool:
    """Satisfiability of a conjunction of < and = literals in a dense order without endpoints"""
    uf = _UnionFind()
    strict: List[Tuple[Term, Term]] = []
    terms: Set[Term] = set()
    for lit in literals:
        if isinstance(lit, Bottom):
            return False
        if isinstance(lit, Eq) and term_sort(lit.left) == Sort.ELEM:
            uf.union(lit.left, lit.right)
            terms |= {lit.left, lit.right}
        elif isinstance(lit, Lt):
            strict.append((lit.left, lit.right))
            terms |= {lit.left, lit.right}
    consts = sorted((t for t in terms if isinstance(t, Const)), key=lambda c: c.value)
    pinned: Dict[object, Rational] = {}
    for c in consts:
        root = uf.find(c)
        if root in pinned and pinned[root] != c.value:
            return False
        pinned[root] = c.value
    for low, high in zip(consts, consts[1:]):
        strict.append((low, high))
    edges: Dict[object, Set[object]] = {}
    for left, right in strict:
        a, b = uf.find(left), uf.find(right)
        if a == b:
            return False
        edges.setdefault(a, set()).add(b)
    return not _has_cycle(edges)


def _has_cycle(edges: Dict[object, Set[object]]) -> bool:
    state: Dict[object, int] = {}

    def visit(node) -> bool:
        state[node] = 1
        for nxt in edges.get(node, ()):
            mark = state.get(nxt, 0)
            if mark == 1 or (mark == 0 and visit(nxt)):
                return True
        state[node] = 2
        return False

    return any(state.get(node, 0) == 0 and visit(node) for node in list(edges))


def _negation_clash(literals: Sequence[Literal]) -> bool:
    present = set(literals)
    return any(isinstance(lit, Not) and lit.body in present for lit in literals)


# ---------------------------------------------------------------- disjunctive normal form

def dnf(f: Formula) -> List[Tuple[Literal, ...]]:
    """Consistent conjunctions of literals of a quantifier-free NNF formula"""
    if isinstance(f, Top):
        return [()]
    if isinstance(f, Bottom):
        return []
    if isinstance(f, Or):
        result = []
        for arg in f.args:
            result.extend(dnf(arg))
        return _prune(result)
    if isinstance(f, And):
        result = [()]
        for arg in f.args:
            options = dnf(arg)
            result = _prune([left + right for left, right in product(result, options)])
            if not result:
                return []
        return result
    if isinstance(f, (Exists, Forall)):
        raise DomainError("dnf expects a quantifier-free formula")
    return _prune([(f,)])


def _prune(conjunctions: List[Tuple[Literal, ...]]) -> List[Tuple[Literal, ...]]:
    kept: List[frozenset] = []
    ordered: List[Tuple[Literal, ...]] = []
    for lits in conjunctions:
        unique = tuple(dict.fromkeys(lits))
        if not order_consistent(unique) or _negation_clash(unique):
            continue
        key = frozenset(unique)
        if any(other <= key for other in kept):
            continue
        survivors = [i for i, other in enumerate(kept) if not key <= other]
        kept = [kept[i] for i in survivors] + [key]
        ordered = [ordered[i] for i in survivors] + [unique]
    return ordered


# ---------------------------------------------------------------- elimination

def _mentions(lit: Literal, var: Var) -> bool:
    return var in free_variables(lit)


def eliminate_exists_conjunction(var: Var, literals: Sequence[Literal], guard: Optional[Guard] = None) -> Formula:
    """∃var over a conjunction of literals; the var must occur only in order literals"""
    literals = list(literals)
    if guard == Guard.NEG:
        literals.append(Lt(var, ZERO))
    elif guard == Guard.POS:
        literals.append(Lt(ZERO, var))
    rest = [lit for lit in literals if not _mentions(lit, var)]
    involved = [lit for lit in literals if _mentions(lit, var)]
    for lit in involved:
        if isinstance(lit, Eq) and lit.left != lit.right:
            other = lit.right if lit.left == var else lit.left
            return simplify(conj(*(substitute(x, {var: other}) for x in literals)))
    lowers, uppers = [], []
    for lit in involved:
        if isinstance(lit, Lt):
            if lit.right == var:
                lowers.append(lit.left)
            else:
                uppers.append(lit.right)
        elif isinstance(lit, Eq):
            continue
        else:
            raise DomainError(f"cannot eliminate {var} from non-order literal {lit}")
    bounds = [simplify_atom(Lt(low, high)) for low in lowers for high in uppers]
    return conj(*rest, *bounds)


def eliminate_exists(var: Var, body: Formula, guard: Optional[Guard] = None) -> Formula:
    """∃var over a quantifier-free NNF body"""
    parts = [eliminate_exists_conjunction(var, lits, guard) for lits in dnf(body)]
    return simplify(disj(*parts))


def eliminate_forall(var: Var, body: Formula, guard: Optional[Guard] = None) -> Formula:
    inner = eliminate_exists(var, nnf(body, negate=True), guard)
    return nnf(inner, negate=True)


def reject_non_order(f: Formula):
    for node in walk(f):
        if isinstance(node, (A, In)) or (isinstance(node, Eq) and term_sort(node.left) == Sort.SET):
            raise DomainError(f"non-order atom {node} in a pure-order formula")
        if isinstance(node, (Exists, Forall)) and node.var.sort == Sort.SET:
            raise DomainError(f"set quantifier over {node.var} in a pure-order formula")


def eliminate_quantifiers(f: Formula) -> Formula:
    """Equivalent quantifier-free formula over any dense order without endpoints"""
    reject_non_order(f)
    result = _eliminate(nnf(f))
    logger.debug("eliminated quantifiers: %s -> %s", f, result)
    return result


def _eliminate(f: Formula) -> Formula:
    if isinstance(f, And):
        return conj(*(_eliminate(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_eliminate(a) for a in f.args))
    if isinstance(f, Exists):
        return eliminate_exists(f.var, _eliminate(f.body), f.guard)
    if isinstance(f, Forall):
        return eliminate_forall(f.var, _eliminate(f.body), f.guard)
    return f


# ---------------------------------------------------------------- evaluation

def eval_term(term: Term, env: Env):
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Var):
        if term not in env:
            raise DomainError(f"no value for free variable {term}")
        return env[term]
    return term.elements


AtomEvaluator = Callable[[Formula, Env], bool]


def evaluate_qf(f: Formula, env: Env, atom: Optional[AtomEvaluator] = None) -> bool:
    """Quantifier-free evaluation; non-order atoms are delegated to the callback"""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Lt):
        return eval_term(f.left, env) < eval_term(f.right, env)
    if isinstance(f, Eq):
        return eval_term(f.left, env) == eval_term(f.right, env)
    if isinstance(f, In):
        return eval_term(f.elem, env) in eval_term(f.set_term, env)
    if isinstance(f, Not):
        return not evaluate_qf(f.body, env, atom)
    if isinstance(f, And):
        return all(evaluate_qf(a, env, atom) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate_qf(a, env, atom) for a in f.args)
    if isinstance(f, Imp):
        return (not evaluate_qf(f.left, env, atom)) or evaluate_qf(f.right, env, atom)
    if atom is not None:
        return atom(f, env)
    raise DomainError(f"cannot evaluate {f}")


def sample_points(anchors: Iterable[Rational], guard: Optional[Guard] = None) -> List[Rational]:
    """One point per complete order cell over the anchors, within the guard"""
    values = set(anchors)
    if guard is not None:
        values.add(Rational(0))
    ordered = sorted(values)
    if not ordered:
        return [Rational(0)]
    points = [ordered[0] - 1] + list(ordered)
    points += [between(a, b) for a, b in zip(ordered, ordered[1:])]
    points.append(ordered[-1] + 1)
    if guard == Guard.NEG:
        points = [p for p in points if p < 0]
    elif guard == Guard.POS:
        points = [p for p in points if p > 0]
    return sorted(points)


def evaluate_order(f: Formula, env: Env) -> bool:
    """Direct semantic evaluation over ℚ; quantifiers range over cell representatives"""
    if isinstance(f, (Exists, Forall)):
        local = {v: env[v] for v in free_variables(f) if v in env}
        anchors = set(local.values()) | set(constants(f.body)) | {Rational(0)}
        results = (
            evaluate_order(f.body, {**env, f.var: p})
            for p in sample_points(anchors, f.guard)
        )
        return any(results) if isinstance(f, Exists) else all(results)
    if isinstance(f, Not):
        return not evaluate_order(f.body, env)
    if isinstance(f, And):
        return all(evaluate_order(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate_order(a, env) for a in f.args)
    if isinstance(f, Imp):
        return (not evaluate_order(f.left, env)) or evaluate_order(f.right, env)
    return evaluate_qf(f, env)


# ---------------------------------------------------------------- order cells

VariableSpec = Union[int, Sequence[Union[Var, str]]]


def default_variables(count: int) -> List[Var]:
    return [Var(f"x{i}") for i in range(1, count + 1)]


def as_variables(variables: VariableSpec) -> List[Var]:
    if isinstance(variables, int):
        return default_variables(variables)
    return [v if isinstance(v, Var) else Var(v) for v in variables]


def enumerate_cells(variables: VariableSpec, parameters: Iterable[Rational] = (),
                    ambient: Optional[Guard] = None) -> List[OrderCell]:
    """All complete order cells over the parameters, optionally inside one sign region"""
    variables = as_variables(variables)
    params = sorted(set(parameters))
    marker = ambient is not None and Rational(0) not in params
    chain_params = sorted(set(params) | ({Rational(0)} if ambient is not None else set()))
    chains: List[List[Block]] = [[Block(frozenset(), p) for p in chain_params]]
    for var in variables:
        grown = []
        for chain in chains:
            for i, block in enumerate(chain):
                joined = list(chain)
                joined[i] = Block(block.variables | {var}, block.parameter)
                grown.append(joined)
            for i in range(len(chain) + 1):
                grown.append(chain[:i] + [Block(frozenset({var}))] + chain[i:])
        chains = grown
    cells = []
    for chain in chains:
        if ambient is not None and not _respects_ambient(chain, ambient):
            continue
        if marker:
            chain = [b for b in chain if not (b.parameter == 0 and not b.variables)]
        cells.append(OrderCell(tuple(variables), tuple(params), tuple(chain), ambient))
    logger.debug("enumerated %d cells over %d variables and %d parameters", len(cells), len(variables), len(params))
    return cells


def _respects_ambient(chain: List[Block], ambient: Guard) -> bool:
    zero = next(i for i, b in enumerate(chain) if b.parameter == 0)
    if chain[zero].variables:
        return False
    for i, block in enumerate(chain):
        if block.variables and (i > zero if ambient == Guard.NEG else i < zero):
            return False
    return True


def cell_of_point(point: Union[Sequence[Rational], Mapping[Var, Rational]], parameters: Iterable[Rational] = (),
                  variables: Optional[VariableSpec] = None, ambient: Optional[Guard] = None) -> OrderCell:
    """The unique cell containing the point"""
    if isinstance(point, Mapping):
        variables = list(point.keys()) if variables is None else as_variables(variables)
        values = [point[v] for v in variables]
    else:
        values = list(point)
        variables = as_variables(len(values) if variables is None else variables)
        if len(variables) != len(values):
            raise DomainError("point arity does not match the variables")
    params = sorted(set(parameters))
    blocks = []
    for value in sorted(set(values) | set(params)):
        members = frozenset(v for v, x in zip(variables, values) if x == value)
        blocks.append(Block(members, value if value in params else None))
    return OrderCell(tuple(variables), tuple(params), tuple(blocks), ambient)


def _check_parameters(f: Formula, params: Sequence[Rational], ambient: Optional[Guard]):
    for c in constants(f):
        if c in params:
            continue
        if ambient == Guard.NEG and c >= 0 or ambient == Guard.POS and c <= 0:
            continue
        raise DomainError(f"parameter {c} of the formula is missing from the cell parameters")


def decompose_to_cells(f: Formula, variables: VariableSpec, parameters: Iterable[Rational] = (),
                       ambient: Optional[Guard] = None) -> List[OrderCell]:
    """Cells on which f holds, decided at each cell representative"""
    variables = as_variables(variables)
    params = sorted(set(parameters))
    if not is_quantifier_free(f):
        f = eliminate_quantifiers(f)
    _check_parameters(f, params, ambient)
    extra = free_variables(f) - set(variables)
    if extra:
        raise DomainError(f"free variables {sorted(v.name for v in extra)} are not cell variables")
    cells = [cell for cell in enumerate_cells(variables, params, ambient) if evaluate_order(f, cell.representative())]
    logger.debug("formula holds on %d cells", len(cells))
    return cells


def cells_formula(cells: Sequence[OrderCell], include_ambient: bool = False) -> Formula:
    return disj(*(cell.to_formula(include_ambient) for cell in cells))


def describe_unary(f: Formula) -> IntervalUnion:
    """Finite union of points and open intervals defined by a one-variable formula"""
    free = sorted(free_variables(f), key=lambda v: v.name)
    if len(free) > 1:
        raise DomainError(f"describe_unary needs one free variable, found {[v.name for v in free]}")
    var = free[0] if free else Var("x")
    qf = eliminate_quantifiers(f)
    params = sorted(constants(qf))
    parts = []
    for cell in decompose_to_cells(qf, [var], params):
        index = cell.position(var)
        block = cell.blocks[index]
        if block.parameter is not None:
            parts.append(IntervalPart.point(block.parameter))
            continue
        low = cell.blocks[index - 1].parameter if index > 0 else None
        high = cell.blocks[index + 1].parameter if index + 1 < len(cell.blocks) else None
        parts.append(IntervalPart.interval(low, high))
    return IntervalUnion.normalize(parts)


def interval_union_formula(union: IntervalUnion, var: Var) -> Formula:
    """Pure-order formula in var defining the union"""
    parts = []
    for part in union.parts:
        if part.kind == "point":
            parts.append(Eq(var, Const(part.low)))
            continue
        bounds = []
        if part.low is not None:
            bounds.append(Lt(Const(part.low), var))
        if part.high is not None:
            bounds.append(Lt(var, Const(part.high)))
        parts.append(conj(*bounds))
    return disj(*parts)


def equivalent_on_cells(left: Formula, right: Formula, variables: Optional[Sequence[Var]] = None) -> bool:
    """Equivalence of pure-order formulas certified on every cell representative"""
    if variables is None:
        variables = sorted(free_variables(left) | free_variables(right), key=lambda v: v.name)
    params = sorted(constants(left) | constants(right) | {Rational(0)})
    return all(
        evaluate_order(left, cell.representative()) == evaluate_order(right, cell.representative())
        for cell in enumerate_cells(list(variables), params)
    )
