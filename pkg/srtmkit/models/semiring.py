# srtmkit/models/semiring.py
"""Registry of exact commutative semirings.

Every value carries the name of its semiring; the generic operations below
dispatch on that name and refuse to combine values of different semirings.
"""
import logging
import random
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Union

import sympy
from pyparsing import (
    Forward,
    Literal,
    Optional as Opt,
    ParseException,
    Suppress,
    Word,
    ZeroOrMore,
    alphanums,
    alphas,
    nums,
)

from srtmkit.errors import BadLiteral, MixedSemirings, OutOfCarrier, UnknownSymbol
from srtmkit.schemas.models import SemiringRow

logger = logging.getLogger(__name__)


class Infinity(Enum):
    POS = "inf"
    NEG = "-inf"


@dataclass(frozen=True)
class Value:
    semiring: str
    payload: Any

    def __str__(self) -> str:
        return get_semiring(self.semiring).render(self)


class Semiring(ABC):
    name: str = ""
    plus_idempotent: bool = False
    carrier: str = ""

    @property
    @abstractmethod
    def _zero(self) -> Any: ...

    @property
    @abstractmethod
    def _one(self) -> Any: ...

    @abstractmethod
    def _add(self, a: Any, b: Any) -> Any: ...

    @abstractmethod
    def _mul(self, a: Any, b: Any) -> Any: ...

    @abstractmethod
    def _parse(self, text: str) -> Any: ...

    @abstractmethod
    def _render(self, payload: Any) -> str: ...

    @abstractmethod
    def _sample(self, rng: random.Random) -> Any: ...

    @abstractmethod
    def contains(self, payload: Any) -> bool: ...

    def zero(self) -> Value:
        return Value(self.name, self._zero)

    def one(self) -> Value:
        return Value(self.name, self._one)

    def _own(self, *values: Value) -> None:
        for v in values:
            if v.semiring != self.name:
                raise MixedSemirings(f"value {v!r} does not belong to {self.name}")

    def add(self, a: Value, b: Value) -> Value:
        self._own(a, b)
        return Value(self.name, self._add(a.payload, b.payload))

    def mul(self, a: Value, b: Value) -> Value:
        self._own(a, b)
        return Value(self.name, self._mul(a.payload, b.payload))

    def parse(self, text: str) -> Value:
        text = text.strip()
        if text == "zero":
            return self.zero()
        if text == "one":
            return self.one()
        if not text:
            raise BadLiteral(f"empty literal for semiring {self.name}")
        return Value(self.name, self._parse(text))

    def render(self, value: Value) -> str:
        self._own(value)
        return self._render(value.payload)

    def sample(self, rng: random.Random) -> Value:
        return Value(self.name, self._sample(rng))


_RATIONAL = re.compile(r"^-?[0-9]+(/[0-9]+)?$")
_NATURAL = re.compile(r"-?[0-9]+")


def _rational(text: str, name: str) -> Fraction:
    if not _RATIONAL.match(text):
        raise BadLiteral(f"'{text}' is not a rational literal for {name}")
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise BadLiteral(f"'{text}' is not a rational literal for {name}: {e}")
    if q < 0:
        raise OutOfCarrier(f"{name} carrier has no negative elements, got '{text}'")
    return q


def _render_rational(q: Fraction) -> str:
    return str(q)


class BooleanSemiring(Semiring):
    name = "bool"
    plus_idempotent = True
    carrier = "{0,1} with max, min"
    _zero = 0
    _one = 1

    def _add(self, a, b):
        return max(a, b)

    def _mul(self, a, b):
        return min(a, b)

    def _parse(self, text):
        if text not in ("0", "1"):
            raise BadLiteral(f"'{text}' is not a Boolean literal (0 or 1)")
        return int(text)

    def _render(self, payload):
        return str(payload)

    def _sample(self, rng):
        return rng.randint(0, 1)

    def contains(self, payload):
        return payload in (0, 1) and isinstance(payload, int)


class NaturalSemiring(Semiring):
    name = "nat"
    plus_idempotent = False
    carrier = "natural numbers with +, *"
    _zero = 0
    _one = 1

    def _add(self, a, b):
        return a + b

    def _mul(self, a, b):
        return a * b

    def _parse(self, text):
        if not _NATURAL.fullmatch(text):
            raise BadLiteral(f"'{text}' is not a natural number literal")
        value = int(text)
        if value < 0:
            raise OutOfCarrier(f"natural numbers have no negative elements, got '{text}'")
        return value

    def _render(self, payload):
        return str(payload)

    def _sample(self, rng):
        return rng.randint(0, 6)

    def contains(self, payload):
        return isinstance(payload, int) and payload >= 0


class TropicalSemiring(Semiring):
    name = "trop"
    plus_idempotent = True
    carrier = "nonnegative rationals and +inf with min, +"
    _zero = Infinity.POS
    _one = Fraction(0)

    def _add(self, a, b):
        if a is Infinity.POS:
            return b
        if b is Infinity.POS:
            return a
        return min(a, b)

    def _mul(self, a, b):
        if a is Infinity.POS or b is Infinity.POS:
            return Infinity.POS
        return a + b

    def _parse(self, text):
        if text == "inf":
            return Infinity.POS
        if text == "-inf":
            raise OutOfCarrier("-inf is not an element of the tropical carrier")
        return _rational(text, self.name)

    def _render(self, payload):
        if payload is Infinity.POS:
            return "inf"
        return _render_rational(payload)

    def _sample(self, rng):
        if rng.random() < 0.15:
            return Infinity.POS
        return Fraction(rng.randint(0, 8), rng.randint(1, 3))

    def contains(self, payload):
        return payload is Infinity.POS or (isinstance(payload, Fraction) and payload >= 0)


class ArcticSemiring(Semiring):
    name = "arct"
    plus_idempotent = True
    carrier = "nonnegative rationals and -inf with max, +"
    _zero = Infinity.NEG
    _one = Fraction(0)

    def _add(self, a, b):
        if a is Infinity.NEG:
            return b
        if b is Infinity.NEG:
            return a
        return max(a, b)

    def _mul(self, a, b):
        if a is Infinity.NEG or b is Infinity.NEG:
            return Infinity.NEG
        return a + b

    def _parse(self, text):
        if text == "-inf":
            return Infinity.NEG
        if text == "inf":
            raise OutOfCarrier("+inf is not an element of the arctic carrier")
        return _rational(text, self.name)

    def _render(self, payload):
        if payload is Infinity.NEG:
            return "-inf"
        return _render_rational(payload)

    def _sample(self, rng):
        if rng.random() < 0.15:
            return Infinity.NEG
        return Fraction(rng.randint(0, 8), rng.randint(1, 3))

    def contains(self, payload):
        return payload is Infinity.NEG or (isinstance(payload, Fraction) and payload >= 0)


class FiveElementLattice(Semiring):
    """The distributive lattice 0 < a, b < ab < 1 with a, b incomparable.

    Elements are stored by name; join and meet go through their down-sets of
    join-irreducibles {a, b, t}.
    """
    name = "lat5"
    plus_idempotent = True
    carrier = "lattice {0, a, b, ab, 1} with join, meet"
    _zero = "0"
    _one = "1"
    _DOWN = {
        "0": frozenset(),
        "a": frozenset("a"),
        "b": frozenset("b"),
        "ab": frozenset("ab"),
        "1": frozenset("abt"),
    }
    _NAME = {v: k for k, v in _DOWN.items()}

    def _add(self, a, b):
        return self._NAME[self._DOWN[a] | self._DOWN[b]]

    def _mul(self, a, b):
        return self._NAME[self._DOWN[a] & self._DOWN[b]]

    def _parse(self, text):
        if text not in self._DOWN:
            raise BadLiteral(f"'{text}' is not an element of lat5 (0, a, b, ab, 1)")
        return text

    def _render(self, payload):
        return payload

    def _sample(self, rng):
        return rng.choice(sorted(self._DOWN))

    def contains(self, payload):
        return payload in self._DOWN


def _poly_grammar():
    expr = Forward()
    number = Word(nums).set_parse_action(lambda t: sympy.Integer(int(t[0])))
    variable = Word(alphas + "_", alphanums + "_").set_parse_action(lambda t: sympy.Symbol(t[0]))
    atom = number | variable | (Suppress("(") + expr + Suppress(")"))

    def _power(t):
        base = t[0]
        return base ** int(t[1]) if len(t) > 1 else base

    power = (atom + Opt(Suppress(Literal("^") | Literal("**")) + Word(nums))).set_parse_action(_power)

    def _product(t):
        out = sympy.Integer(1)
        for f in t:
            out = out * f
        return out

    def _sum(t):
        out = sympy.Integer(0)
        for f in t:
            out = out + f
        return out

    term = (power + ZeroOrMore(Suppress("*") + power)).set_parse_action(_product)
    expr <<= (term + ZeroOrMore(Suppress("+") + term)).set_parse_action(_sum)
    return expr


_POLY = _poly_grammar()


class PolynomialSemiring(Semiring):
    """Provenance polynomials N[X]; payloads are expanded sympy expressions."""
    name = "poly"
    plus_idempotent = False
    carrier = "polynomials with natural coefficients with +, *"
    _zero = sympy.Integer(0)
    _one = sympy.Integer(1)
    _SAMPLE_VARS = (sympy.Symbol("x"), sympy.Symbol("y"))

    def _add(self, a, b):
        return sympy.expand(a + b)

    def _mul(self, a, b):
        return sympy.expand(a * b)

    def _parse(self, text):
        body = text[1:-1] if text.startswith("{") and text.endswith("}") else text
        try:
            expr = _POLY.parse_string(body, parse_all=True)[0]
        except ParseException as e:
            raise BadLiteral(f"'{text}' is not a polynomial literal: {e}")
        expr = sympy.expand(expr)
        if not self.contains(expr):
            raise OutOfCarrier(f"'{text}' does not have natural coefficients")
        return expr

    def _render(self, payload):
        return str(payload).replace("**", "^").replace(" ", "")

    def _sample(self, rng):
        out = sympy.Integer(0)
        for _ in range(rng.randint(0, 3)):
            mono = sympy.Integer(rng.randint(1, 2))
            for var in self._SAMPLE_VARS:
                mono = mono * var ** rng.randint(0, 2)
            out = out + mono
        return sympy.expand(out)

    def contains(self, payload):
        if not isinstance(payload, sympy.Expr):
            return False
        if payload.is_Integer:
            return payload >= 0
        symbols = sorted(payload.free_symbols, key=str)
        try:
            coeffs = sympy.Poly(payload, *symbols).coeffs()
        except sympy.PolynomialError:
            return False
        return all(c.is_Integer and c >= 0 for c in coeffs)


SEMIRINGS: Dict[str, Semiring] = {
    s.name: s
    for s in (
        BooleanSemiring(),
        NaturalSemiring(),
        TropicalSemiring(),
        ArcticSemiring(),
        FiveElementLattice(),
        PolynomialSemiring(),
    )
}

SemiringRef = Union[str, Semiring]


def get_semiring(ref: SemiringRef) -> Semiring:
    if isinstance(ref, Semiring):
        return ref
    try:
        return SEMIRINGS[ref]
    except KeyError:
        raise UnknownSymbol(f"unknown semiring '{ref}' (known: {', '.join(SEMIRINGS)})")


def list_semirings() -> List[SemiringRow]:
    return [
        SemiringRow(name=s.name, plus_idempotent=s.plus_idempotent, carrier=s.carrier)
        for s in SEMIRINGS.values()
    ]


def law_violations(s: Semiring, a: Value, b: Value, c: Value) -> List[str]:
    """Names of the commutative semiring laws that fail on the triple."""
    add, mul = s.add, s.mul
    laws = {
        "add associative": add(add(a, b), c) == add(a, add(b, c)),
        "add commutative": add(a, b) == add(b, a),
        "add identity": add(a, s.zero()) == a,
        "mul associative": mul(mul(a, b), c) == mul(a, mul(b, c)),
        "mul commutative": mul(a, b) == mul(b, a),
        "mul identity": mul(a, s.one()) == a,
        "distributive": mul(a, add(b, c)) == add(mul(a, b), mul(a, c)),
        "annihilation": mul(a, s.zero()) == s.zero(),
    }
    if s.plus_idempotent:
        laws["add idempotent"] = add(a, a) == a
    return [name for name, holds in laws.items() if not holds]


def zero(ref: SemiringRef) -> Value:
    return get_semiring(ref).zero()


def one(ref: SemiringRef) -> Value:
    return get_semiring(ref).one()


def add(a: Value, b: Value) -> Value:
    if a.semiring != b.semiring:
        raise MixedSemirings(f"cannot add {a.semiring} and {b.semiring} values")
    return get_semiring(a.semiring).add(a, b)


def mul(a: Value, b: Value) -> Value:
    if a.semiring != b.semiring:
        raise MixedSemirings(f"cannot multiply {a.semiring} and {b.semiring} values")
    return get_semiring(a.semiring).mul(a, b)


def fold_add(items: Iterable[Value], ref: SemiringRef) -> Value:
    s = get_semiring(ref)
    acc = s.zero()
    for v in items:
        acc = s.add(acc, v)
    return acc


def fold_mul(items: Iterable[Value], ref: SemiringRef) -> Value:
    s = get_semiring(ref)
    acc = s.one()
    for v in items:
        acc = s.mul(acc, v)
    return acc


def is_zero(v: Value) -> bool:
    return v == get_semiring(v.semiring).zero()


def is_one(v: Value) -> bool:
    return v == get_semiring(v.semiring).one()


def parse_value(text: str, ref: SemiringRef) -> Value:
    return get_semiring(ref).parse(text)


def render_value(v: Value) -> str:
    return get_semiring(v.semiring).render(v)


_SIMPLE_LITERAL = re.compile(r"^-?[A-Za-z0-9_/]+$")


def literal(v: Value) -> str:
    """`#`-prefixed literal; braces when the rendering has operator characters."""
    text = render_value(v)
    if _SIMPLE_LITERAL.match(text):
        return f"#{text}"
    return "#{" + text + "}"


def parse_literal(token: str, ref: SemiringRef) -> Value:
    if not token.startswith("#"):
        raise BadLiteral(f"value literal must start with '#', got '{token}'")
    body = token[1:]
    if body.startswith("{") and body.endswith("}"):
        body = body[1:-1]
    return parse_value(body, ref)
