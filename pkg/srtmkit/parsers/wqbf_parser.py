# srtmkit/parsers/wqbf_parser.py
"""Concrete syntax for weighted QBFs.

    unit := 'sum' v '.' unit | 'prod' v '.' unit | v | '!' v | #literal
          | surr@i | surr:name | '(' unit (op unit)* ')'      op := + | *

Negation stands in front of variables only.
"""
import sys

from pyparsing import (
    Forward,
    Keyword,
    Literal,
    MatchFirst,
    ParseBaseException,
    ParserElement,
    Regex,
    Suppress,
    Word,
    ZeroOrMore,
    nums,
)

from srtmkit.errors import FormulaSyntaxError
from srtmkit.models import wqbf as q
from srtmkit.models.semiring import SemiringRef, parse_literal
from srtmkit.parsers.formula_parser import LITERAL_PATTERN, RECURSION_LIMIT

ParserElement.enable_packrat()


def _grammar(semiring_box: list):
    unit = Forward()
    reserved = MatchFirst([Keyword("sum"), Keyword("prod"), Keyword("surr")])
    var = ~reserved + Regex(r"[A-Za-z_][A-Za-z0-9_']*")

    positive = var.copy().set_parse_action(lambda t: q.PosLit(t[0]))
    negative = (Suppress("!") + var).set_parse_action(lambda t: q.NegLit(t[0]))
    constant = Regex(LITERAL_PATTERN).set_parse_action(
        lambda t: q.Const(parse_literal(t[0], semiring_box[0]))
    )
    by_position = (Suppress(Literal("surr@")) + Word(nums)).set_parse_action(
        lambda t: q.Surrogate(q.InputPosition(int(t[0])))
    )
    by_name = (Suppress(Literal("surr:")) + Regex(r"[A-Za-z_][A-Za-z0-9_]*")).set_parse_action(
        lambda t: q.Surrogate(q.NamedConst(t[0]))
    )
    quantified = (
        (Keyword("sum") | Keyword("prod")) + var + Suppress(".") + unit
    ).set_parse_action(lambda t: q.SumVar(t[1], t[2]) if t[0] == "sum" else q.ProdVar(t[1], t[2]))

    def _group(t):
        parts, ops = [t[0]], set()
        for op, part in zip(t[1::2], t[2::2]):
            ops.add(op)
            parts.append(part)
        if len(ops) > 1:
            raise FormulaSyntaxError("'+' and '*' mixed in one group; add parentheses")
        if not ops:
            return parts[0]
        return q.Plus(tuple(parts)) if ops.pop() == "+" else q.Times(tuple(parts))

    group = (
        Suppress("(") + unit + ZeroOrMore((Literal("+") | Literal("*")) + unit) + Suppress(")")
    ).set_parse_action(_group)

    unit <<= quantified | by_position | by_name | group | constant | negative | positive
    return unit


class WqbfParser:
    def __init__(self, semiring: SemiringRef):
        self._semiring = [semiring]
        self._unit = _grammar(self._semiring)

    def parse(self, text: str):
        if sys.getrecursionlimit() < RECURSION_LIMIT:
            sys.setrecursionlimit(RECURSION_LIMIT)
        try:
            return self._unit.parse_string(text, parse_all=True)[0]
        except ParseBaseException as e:
            raise FormulaSyntaxError(
                f"weighted QBF syntax error at line {e.lineno}, column {e.col}: {e.msg}"
            ) from e


def parse_wqbf(text: str, semiring: SemiringRef):
    return WqbfParser(semiring).parse(text)
