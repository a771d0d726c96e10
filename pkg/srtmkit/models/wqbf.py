# srtmkit/models/wqbf.py
"""Weighted quantified Boolean formulas and literal interpretations."""
from dataclasses import dataclass
from typing import FrozenSet, Iterator, Tuple, Union

from srtmkit.models.semiring import Value, literal


@dataclass(frozen=True)
class InputPosition:
    index: int


@dataclass(frozen=True)
class NamedConst:
    name: str


@dataclass(frozen=True)
class Const:
    value: Value


@dataclass(frozen=True)
class PosLit:
    var: str


@dataclass(frozen=True)
class NegLit:
    var: str


@dataclass(frozen=True)
class Surrogate:
    tag: Union[InputPosition, NamedConst]


@dataclass(frozen=True)
class Plus:
    parts: Tuple["WQbf", ...]


@dataclass(frozen=True)
class Times:
    parts: Tuple["WQbf", ...]


@dataclass(frozen=True)
class SumVar:
    var: str
    body: "WQbf"


@dataclass(frozen=True)
class ProdVar:
    var: str
    body: "WQbf"


WQbf = Union[Const, PosLit, NegLit, Surrogate, Plus, Times, SumVar, ProdVar]


@dataclass(frozen=True)
class LiteralInterp:
    """A consistent set of literals, stored as variable -> polarity."""
    literals: FrozenSet[Tuple[str, bool]] = frozenset()

    def with_pos(self, var: str) -> "LiteralInterp":
        return LiteralInterp(frozenset(l for l in self.literals if l[0] != var) | {(var, True)})

    def with_neg(self, var: str) -> "LiteralInterp":
        return LiteralInterp(frozenset(l for l in self.literals if l[0] != var) | {(var, False)})

    def holds(self, var: str, positive: bool) -> bool:
        return (var, positive) in self.literals

    def is_consistent(self) -> bool:
        names = [v for v, _ in self.literals]
        return len(names) == len(set(names))

    @classmethod
    def of(cls, assignment) -> "LiteralInterp":
        return cls(frozenset((v, bool(b)) for v, b in dict(assignment).items()))


def children(node) -> Iterator:
    if isinstance(node, (Plus, Times)):
        yield from node.parts
    elif isinstance(node, (SumVar, ProdVar)):
        yield node.body


def free_vars(node) -> FrozenSet[str]:
    if isinstance(node, (PosLit, NegLit)):
        return frozenset((node.var,))
    out = frozenset()
    for child in children(node):
        out |= free_vars(child)
    if isinstance(node, (SumVar, ProdVar)):
        out -= {node.var}
    return out


def bound_vars(node) -> FrozenSet[str]:
    out = frozenset((node.var,)) if isinstance(node, (SumVar, ProdVar)) else frozenset()
    for child in children(node):
        out |= bound_vars(child)
    return out


def quantifier_count(node) -> int:
    own = 1 if isinstance(node, (SumVar, ProdVar)) else 0
    return own + sum(quantifier_count(c) for c in children(node))


def is_fully_quantified(node) -> bool:
    return not free_vars(node)


def surrogates(node) -> FrozenSet[Surrogate]:
    if isinstance(node, Surrogate):
        return frozenset((node,))
    out = frozenset()
    for child in children(node):
        out |= surrogates(child)
    return out


def _prefix(node):
    while isinstance(node, SumVar):
        node = node.body
    return node


def _has_quantifier(node) -> bool:
    if isinstance(node, (SumVar, ProdVar)):
        return True
    return any(_has_quantifier(c) for c in children(node))


def is_sum_bf(node) -> bool:
    """Fully quantified with a prefix of sum quantifiers only and a quantifier-free matrix."""
    return is_fully_quantified(node) and not _has_quantifier(_prefix(node))


def render_wqbf(node) -> str:
    if isinstance(node, Const):
        return literal(node.value)
    if isinstance(node, PosLit):
        return node.var
    if isinstance(node, NegLit):
        return f"!{node.var}"
    if isinstance(node, Surrogate):
        tag = node.tag
        return f"surr@{tag.index}" if isinstance(tag, InputPosition) else f"surr:{tag.name}"
    if isinstance(node, Plus):
        return "(" + " + ".join(render_wqbf(p) for p in node.parts) + ")"
    if isinstance(node, Times):
        return "(" + " * ".join(render_wqbf(p) for p in node.parts) + ")"
    if isinstance(node, SumVar):
        return f"sum {node.var}. {render_wqbf(node.body)}"
    if isinstance(node, ProdVar):
        return f"prod {node.var}. {render_wqbf(node.body)}"
    raise TypeError(f"not a weighted QBF node: {node!r}")


def plus(*parts):
    return parts[0] if len(parts) == 1 else Plus(tuple(parts))


def times(*parts):
    return parts[0] if len(parts) == 1 else Times(tuple(parts))


def sum_all(variables, body):
    for v in reversed(list(variables)):
        body = SumVar(v, body)
    return body
