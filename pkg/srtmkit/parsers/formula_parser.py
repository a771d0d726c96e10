# srtmkit/parsers/formula_parser.py
"""Concrete syntax for weighted logic formulas.

    unit  := quantifier | 'not' unit | '(' unit (op unit)* ')' | #literal
           | Name(x, ...) | x <= y | x = y
    op    := or | and | -> | <-> | + | *      (one operator per group)

Quantifiers are `sum x.`, `prod x.`, `exists x.`, `forall x.` and
`sumset X/k.`, `prodset X/k.`, `existsset X/k.`, `forallset X/k.`; each binds
the single unit after the dot.
"""
import logging
import sys
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from pyparsing import (
    DelimitedList,
    Forward,
    Group,
    Keyword,
    Literal,
    MatchFirst,
    Optional as Opt,
    ParseBaseException,
    ParserElement,
    Regex,
    Suppress,
    Word,
    ZeroOrMore,
    nums,
)

from srtmkit.errors import ArityMismatch, FormulaSyntaxError, UnknownSymbol
from srtmkit.models import formulas as f
from srtmkit.models.semiring import SemiringRef, parse_literal
from srtmkit.models.structure import Signature

ParserElement.enable_packrat()

# deeply nested generated formulas recurse through pyparsing
RECURSION_LIMIT = 20000

logger = logging.getLogger(__name__)

FO_QUANTIFIERS = ("sum", "prod", "exists", "forall")
SO_QUANTIFIERS = ("sumset", "prodset", "existsset", "forallset")
RESERVED = FO_QUANTIFIERS + SO_QUANTIFIERS + ("not", "or", "and")

LITERAL_PATTERN = r"#(\{[^}]*\}|-?[A-Za-z0-9_/]+)"


@dataclass(frozen=True)
class _Raw:
    kind: str
    items: tuple


def _raw(kind):
    return lambda t: _Raw(kind, tuple(t))


def _grammar():
    unit = Forward()
    reserved = MatchFirst([Keyword(k) for k in RESERVED])
    ident = ~reserved + Regex(r"[A-Za-z_][A-Za-z0-9_']*")

    literal = Regex(LITERAL_PATTERN).set_parse_action(_raw("lit"))
    atom = (
        ident + Suppress("(") + Group(Opt(DelimitedList(ident))) + Suppress(")")
    ).set_parse_action(lambda t: _Raw("atom", (t[0], tuple(t[1]))))
    comparison = (ident + (Literal("<=") | Literal("=")) + ident).set_parse_action(
        lambda t: _Raw("leq" if t[1] == "<=" else "eq", (t[0], t[2]))
    )
    negation = (Suppress(Keyword("not")) + unit).set_parse_action(_raw("not"))

    fo_quantifier = (
        MatchFirst([Keyword(k) for k in FO_QUANTIFIERS]) + ident + Suppress(".") + unit
    ).set_parse_action(lambda t: _Raw("quant", (t[0], t[1], None, t[2])))
    so_quantifier = (
        MatchFirst([Keyword(k) for k in SO_QUANTIFIERS])
        + ident
        + Suppress("/")
        + Word(nums)
        + Suppress(".")
        + unit
    ).set_parse_action(lambda t: _Raw("quant", (t[0], t[1], int(t[2]), t[3])))

    operator = (
        Literal("<->") | Literal("->") | Keyword("or") | Keyword("and") | Literal("+") | Literal("*")
    )
    group = (Suppress("(") + unit + ZeroOrMore(operator + unit) + Suppress(")")).set_parse_action(
        _raw("group")
    )

    unit <<= so_quantifier | fo_quantifier | negation | group | literal | atom | comparison
    return unit


_UNIT = _grammar()


class FormulaParser:
    """Parses formula text and resolves symbols against a signature."""

    def __init__(
        self,
        sig: Signature,
        semiring: SemiringRef,
        free_sets: Optional[Dict[str, int]] = None,
    ):
        self.sig = sig
        self.semiring = semiring
        self.free_sets = dict(free_sets or {})

    def parse(self, text: str):
        if sys.getrecursionlimit() < RECURSION_LIMIT:
            sys.setrecursionlimit(RECURSION_LIMIT)
        try:
            raw = _UNIT.parse_string(text, parse_all=True)[0]
        except ParseBaseException as e:
            raise FormulaSyntaxError(
                f"formula syntax error at line {e.lineno}, column {e.col}: {e.msg}"
            ) from e
        node = self._build(raw, {})
        logger.debug("parsed formula with %d nodes", f.size(node))
        return node

    def _build(self, raw: _Raw, scope: Dict[str, int]):
        kind, items = raw.kind, raw.items
        if kind == "leq":
            return f.Leq(*items)
        if kind == "eq":
            return f.equals(*items)
        if kind == "lit":
            return f.Const(parse_literal(items[0], self.semiring))
        if kind == "atom":
            return self._atom(items[0], items[1], scope)
        if kind == "not":
            body = self._build(items[0], scope)
            self._require_bool(body, "not")
            return f.Not(body)
        if kind == "group":
            return self._group(items, scope)
        if kind == "quant":
            return self._quantifier(*items, scope=scope)
        raise FormulaSyntaxError(f"unexpected construct {kind}")

    def _atom(self, name: str, args: Tuple[str, ...], scope: Dict[str, int]):
        if name in scope or name in self.free_sets:
            expected = scope.get(name, self.free_sets.get(name))
            node = f.XAtom(name, args)
        elif self.sig.is_bool(name):
            expected = self.sig.arity(name)
            node = f.RAtom(name, args)
        elif self.sig.is_weighted(name):
            expected = self.sig.arity(name)
            node = f.WAtom(name, args)
        else:
            raise UnknownSymbol(f"'{name}' is neither a relation of the signature nor a set variable")
        if len(args) != expected:
            raise ArityMismatch(f"'{name}' has arity {expected} but is applied to {len(args)} argument(s)")
        return node

    def _group(self, items, scope):
        parts = [self._build(items[0], scope)]
        operators = set()
        for op, raw in zip(items[1::2], items[2::2]):
            operators.add(op)
            parts.append(self._build(raw, scope))
        if not operators:
            return parts[0]
        if len(operators) > 1:
            raise FormulaSyntaxError(
                f"operators {', '.join(sorted(operators))} mixed in one group; add parentheses"
            )
        op = operators.pop()
        if op in ("+", "*"):
            return f.Plus(tuple(parts)) if op == "+" else f.Times(tuple(parts))
        for part in parts:
            self._require_bool(part, op)
        if op == "or":
            return f.Or(tuple(parts))
        if op == "and":
            return f.conj(*parts)
        if len(parts) != 2:
            raise FormulaSyntaxError(f"'{op}' takes exactly two operands")
        return f.implies(*parts) if op == "->" else f.iff(*parts)

    def _quantifier(self, keyword: str, var: str, arity: Optional[int], raw: _Raw, scope):
        if arity is not None:
            if arity < 1:
                raise FormulaSyntaxError(f"set variable {var} needs arity at least 1")
            body = self._build(raw, {**scope, var: arity})
        else:
            body = self._build(raw, scope)
        if keyword in ("exists", "forall", "existsset", "forallset"):
            self._require_bool(body, keyword)
        if keyword == "sum":
            return f.SumFO(var, body)
        if keyword == "prod":
            return f.ProdFO(var, body)
        if keyword == "exists":
            return f.ExistsFO(var, body)
        if keyword == "forall":
            return f.forall(var, body)
        if keyword == "sumset":
            return f.SumSO(var, arity, body)
        if keyword == "prodset":
            return f.ProdSO(var, arity, body)
        if keyword == "existsset":
            return f.ExistsSO(var, arity, body)
        return f.forall_set(var, arity, body)

    @staticmethod
    def _require_bool(node, context: str) -> None:
        if not f.is_bool(node):
            raise FormulaSyntaxError(f"'{context}' applies to Boolean formulas only, got {f.render(node)}")


def parse_formula(
    text: str,
    sig: Signature,
    semiring: SemiringRef,
    free_sets: Optional[Dict[str, int]] = None,
):
    return FormulaParser(sig, semiring, free_sets).parse(text)
