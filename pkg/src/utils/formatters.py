from typing import List, Optional

from src.core.cell import IntervalUnion
from src.core.finite_set import FiniteSetQ
from src.core.formula import (
    A, And, Bottom, Const, Eq, Exists, Forall, Formula, Guard, Imp, In, Lt, Not, Or,
    SetLit, Sort, Top, Var,
)
from src.core.normal_form import RelativeNormalForm
from src.core.rational import Rational, format_rational

_ATOM_HEADS = {Lt: "<", Eq: "=", A: "A"}


def format_term(term) -> str:
    """Print a term: name, rational literal or (set ...)"""
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Const):
        return format_rational(term.value)
    if isinstance(term, SetLit):
        return "(" + " ".join(["set"] + term.elements.to_strings()) + ")"
    raise TypeError(f"not a term: {term!r}")


def _quantifier_head(f) -> str:
    head = "exists" if isinstance(f, Exists) else "forall"
    if f.var.sort == Sort.SET:
        return head + "-set"
    if f.guard == Guard.NEG:
        return head + "-neg"
    if f.guard == Guard.POS:
        return head + "-pos"
    return head


def print_formula(f: Formula) -> str:
    """Canonical prefix text; parse_formula reads it back to the same tree"""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Eq) and isinstance(f.left, Var) and isinstance(f.right, Var) and f.left.sort == Sort.SET:
        return f"(set= {f.left.name} {f.right.name})"
    if isinstance(f, In):
        return f"(in {format_term(f.elem)} {format_term(f.set_term)})"
    if type(f) in _ATOM_HEADS:
        return f"({_ATOM_HEADS[type(f)]} {format_term(f.left)} {format_term(f.right)})"
    if isinstance(f, Not):
        return f"(not {print_formula(f.body)})"
    if isinstance(f, (And, Or)):
        head = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([head] + [print_formula(a) for a in f.args]) + ")"
    if isinstance(f, Imp):
        return f"(imp {print_formula(f.left)} {print_formula(f.right)})"
    if isinstance(f, (Exists, Forall)):
        return f"({_quantifier_head(f)} {f.var.name} {print_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def format_set(values: FiniteSetQ) -> str:
    """{1/2, 1}: elements in increasing order"""
    return str(values)


def format_endpoint(value: Optional[Rational], infinity: str) -> str:
    return infinity if value is None else format_rational(value)


def interval_union_records(union: IntervalUnion) -> List[dict]:
    records = []
    for part in union.parts:
        if part.kind == "point":
            records.append({"kind": "point", "endpoints": [format_rational(part.low)]})
        else:
            records.append({
                "kind": "interval",
                "endpoints": [format_endpoint(part.low, "-inf"), format_endpoint(part.high, "+inf")],
            })
    return records


def format_rnf(rnf: RelativeNormalForm) -> str:
    """One line per disjunct: chi | theta"""
    lines = [f"stratum: {rnf.stratum}"]
    if not rnf.disjuncts:
        lines.append("  false")
    for chi, theta in rnf.disjuncts:
        lines.append(f"  {print_formula(chi)} | {print_formula(theta)}")
    return "\n".join(lines)


def format_verdict(ok: bool, text: str) -> str:
    """Status line with ✅/❌ prefix"""
    return f"{'✅' if ok else '❌'} {text}"
