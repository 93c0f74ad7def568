import re
from dataclasses import dataclass
from typing import Dict, List, Set, Union

import pyparsing as pp

from src.core.errors import DomainError, FormulaSyntaxError, SortError
from src.core.finite_set import FiniteSetQ
from src.core.formula import (
    FALSE, TRUE, A, And, Const, Eq, Exists, Forall, Formula, Guard, Imp, In, Language,
    Lt, Not, Or, SetLit, Sort, Term, Var, term_sort,
)
from src.core.rational import is_rational_literal, parse_rational

pp.ParserElement.enable_packrat()

IDENTIFIER_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")

QUANTIFIERS = {
    "exists": (Exists, None, Sort.ELEM),
    "forall": (Forall, None, Sort.ELEM),
    "exists-neg": (Exists, Guard.NEG, Sort.ELEM),
    "forall-neg": (Forall, Guard.NEG, Sort.ELEM),
    "exists-pos": (Exists, Guard.POS, Sort.ELEM),
    "forall-pos": (Forall, Guard.POS, Sort.ELEM),
    "exists-set": (Exists, None, Sort.SET),
    "forall-set": (Forall, None, Sort.SET),
}
ATOMS = {"<": Lt, "=": Eq, "set=": Eq, "A": A, "in": In}
KEYWORDS = set(QUANTIFIERS) | set(ATOMS) | {"not", "and", "or", "imp", "set", "true", "false"}


@dataclass
class _Token:
    text: str
    loc: int


@dataclass
class _List:
    items: list
    loc: int


def _build_grammar() -> pp.ParserElement:
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")
    token = pp.Regex(r"[^\s()]+").set_parse_action(lambda s, loc, toks: _Token(toks[0], loc))
    sexpr = pp.Forward()
    group = pp.Group(lpar + pp.ZeroOrMore(sexpr) + rpar)
    group.set_parse_action(lambda s, loc, toks: _List(list(toks[0]), loc))
    sexpr <<= token | group
    return sexpr


GRAMMAR = _build_grammar()


def read_sexpr(text: str) -> Union[_Token, _List]:
    try:
        result = GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise FormulaSyntaxError(f"malformed formula: {e.msg}", e.loc) from e
    return result[0]


def parse_formula(text: str, language: Union[Language, str] = Language.ORDER_A) -> Formula:
    """Parse prefix text into a sort-checked formula without shadowed binders"""
    language = Language(language)
    tree = read_sexpr(text)
    converter = _Converter(language)
    if language == Language.WMSO:
        converter.infer_set_names(tree)
    return converter.formula(tree, {})


class _Converter:
    def __init__(self, language: Language):
        self.language = language
        self.set_names: Set[str] = set()

    # ------------------------------------------------------------ sort inference

    def infer_set_names(self, tree):
        """Free names used as sets: second argument of in, an argument of set=, or equated with a set"""
        changed = True
        while changed:
            before = len(self.set_names)
            self._infer(tree, {})
            changed = len(self.set_names) != before

    def _infer(self, node, bound: Dict[str, Sort]):
        if not isinstance(node, _List) or not node.items or not isinstance(node.items[0], _Token):
            return
        head = node.items[0].text
        args = node.items[1:]
        if head in QUANTIFIERS and len(args) == 2 and isinstance(args[0], _Token):
            self._infer(args[1], {**bound, args[0].text: QUANTIFIERS[head][2]})
            return
        if head == "in" and len(args) == 2 and isinstance(args[1], _Token):
            name = args[1].text
            if name not in bound and IDENTIFIER_RE.match(name):
                self.set_names.add(name)
        if head in ("=", "set=") and len(args) == 2:
            if head == "set=" or any(self._is_set_node(a, bound) for a in args):
                for arg in args:
                    if isinstance(arg, _Token) and arg.text not in bound and IDENTIFIER_RE.match(arg.text):
                        self.set_names.add(arg.text)
        for arg in args:
            self._infer(arg, bound)

    def _is_set_node(self, node, bound: Dict[str, Sort]) -> bool:
        if isinstance(node, _List):
            return bool(node.items) and isinstance(node.items[0], _Token) and node.items[0].text == "set"
        if node.text in bound:
            return bound[node.text] == Sort.SET
        return node.text in self.set_names

    # ------------------------------------------------------------ conversion

    def formula(self, node, scope: Dict[str, Var]) -> Formula:
        if isinstance(node, _Token):
            if node.text == "true":
                return TRUE
            if node.text == "false":
                return FALSE
            raise FormulaSyntaxError(f"expected a formula, found {node.text!r}", node.loc)
        if not node.items or not isinstance(node.items[0], _Token):
            raise FormulaSyntaxError("expected an operator", node.loc)
        head = node.items[0].text
        args = node.items[1:]
        if head in ATOMS:
            return self.atom(head, args, node, scope)
        if head == "not":
            self._arity(node, args, 1)
            return Not(self.formula(args[0], scope))
        if head in ("and", "or"):
            kind = And if head == "and" else Or
            return kind(tuple(self.formula(a, scope) for a in args))
        if head == "imp":
            self._arity(node, args, 2)
            return Imp(self.formula(args[0], scope), self.formula(args[1], scope))
        if head in QUANTIFIERS:
            return self.quantifier(head, args, node, scope)
        raise FormulaSyntaxError(f"unknown operator {head!r}", node.items[0].loc)

    def quantifier(self, head: str, args: list, node: _List, scope: Dict[str, Var]) -> Formula:
        self._arity(node, args, 2)
        kind, guard, sort = QUANTIFIERS[head]
        if not isinstance(args[0], _Token) or not IDENTIFIER_RE.match(args[0].text) or args[0].text in KEYWORDS:
            raise FormulaSyntaxError("quantifier needs a variable name", node.loc)
        if self.language == Language.ORDER_A and sort == Sort.SET:
            raise SortError("set quantifier outside the weak monadic language", head)
        if self.language == Language.WMSO and sort == Sort.ELEM:
            if guard == Guard.NEG:
                raise SortError("elements of the weak monadic structure are positive", head)
            guard = None
        name = args[0].text
        if name in scope:
            taken = set(scope) | {v.name for v in scope.values()}
            while name in taken:
                name += "'"
        var = Var(name, sort)
        inner = dict(scope)
        inner[args[0].text] = var
        return kind(var, self.formula(args[1], inner), guard)

    def atom(self, head: str, args: list, node: _List, scope: Dict[str, Var]) -> Formula:
        self._arity(node, args, 2)
        left, right = self.term(args[0], scope), self.term(args[1], scope)
        text = f"({head} {left} {right})"
        if head == "A" and self.language != Language.ORDER_A:
            raise SortError("A is not a symbol of the weak monadic language", text)
        if head == "in":
            if self.language != Language.WMSO:
                raise SortError("membership outside the weak monadic language", text)
            if term_sort(left) != Sort.ELEM or term_sort(right) != Sort.SET:
                raise SortError("membership relates an element to a set", text)
            return In(left, right)
        if head == "=":
            if term_sort(left) != term_sort(right):
                raise SortError("equality across sorts", text)
            return Eq(left, right)
        if head == "set=":
            if self.language != Language.WMSO:
                raise SortError("set equality outside the weak monadic language", text)
            if term_sort(left) != Sort.SET or term_sort(right) != Sort.SET:
                raise SortError("set= relates two sets", text)
            return Eq(left, right)
        if term_sort(left) != Sort.ELEM or term_sort(right) != Sort.ELEM:
            raise SortError("order atoms relate elements", text)
        return ATOMS[head](left, right)

    def term(self, node, scope: Dict[str, Var]) -> Term:
        if isinstance(node, _List):
            if not node.items or not isinstance(node.items[0], _Token) or node.items[0].text != "set":
                raise FormulaSyntaxError("expected a term", node.loc)
            if self.language != Language.WMSO:
                raise SortError("set literal outside the weak monadic language", "(set ...)")
            values = []
            for item in node.items[1:]:
                if not isinstance(item, _Token) or not is_rational_literal(item.text):
                    raise FormulaSyntaxError("set literal elements must be rationals", node.loc)
                values.append(parse_rational(item.text))
            if any(v <= 0 for v in values):
                raise SortError("set literals contain positive rationals only", "(set ...)")
            return SetLit(FiniteSetQ.of(values))
        text = node.text
        if is_rational_literal(text):
            value = parse_rational(text)
            if self.language == Language.WMSO and value <= 0:
                raise SortError("element literals of the weak monadic language are positive", text)
            return Const(value)
        if not IDENTIFIER_RE.match(text) or text in KEYWORDS:
            raise FormulaSyntaxError(f"bad term {text!r}", node.loc)
        if text in scope:
            return scope[text]
        if text in self.set_names:
            return Var(text, Sort.SET)
        return Var(text, Sort.ELEM)

    @staticmethod
    def _arity(node: _List, args: List, count: int):
        if len(args) != count:
            raise FormulaSyntaxError(f"expected {count} argument(s), found {len(args)}", node.loc)


def parse_term_value(text: str):
    """Command-line value: a rational, or a set literal "(set ...)" / "{...}" """
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        inner = text[1:-1].replace(",", " ").split()
        return FiniteSetQ.of(parse_rational(t) for t in inner)
    if text.startswith("("):
        term = _Converter(Language.WMSO).term(read_sexpr(text), {})
        if not isinstance(term, SetLit):
            raise DomainError(f"not a value: {text}")
        return term.elements
    return parse_rational(text)
