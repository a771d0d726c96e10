# srtmkit/models/formulas.py
"""Abstract syntax of Boolean and weighted first/second-order formulas.

Boolean nodes are also weighted formulas: wherever a weighted formula is
expected a Boolean node may stand, and it denotes one or zero.
"""
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterator, Tuple, Union

from srtmkit.models.semiring import Value, literal


# --- Boolean layer ---

@dataclass(frozen=True)
class Leq:
    left: str
    right: str


@dataclass(frozen=True)
class RAtom:
    name: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class XAtom:
    name: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Not:
    body: "BoolFormula"


@dataclass(frozen=True)
class Or:
    parts: Tuple["BoolFormula", ...]


@dataclass(frozen=True)
class ExistsFO:
    var: str
    body: "BoolFormula"


@dataclass(frozen=True)
class ExistsSO:
    var: str
    arity: int
    body: "BoolFormula"


BoolFormula = Union[Leq, RAtom, XAtom, Not, Or, ExistsFO, ExistsSO]
BOOL_NODES = (Leq, RAtom, XAtom, Not, Or, ExistsFO, ExistsSO)


# --- weighted layer ---

@dataclass(frozen=True)
class Const:
    value: Value


@dataclass(frozen=True)
class WAtom:
    name: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Plus:
    parts: Tuple["WFormula", ...]


@dataclass(frozen=True)
class Times:
    parts: Tuple["WFormula", ...]


@dataclass(frozen=True)
class SumFO:
    var: str
    body: "WFormula"


@dataclass(frozen=True)
class ProdFO:
    var: str
    body: "WFormula"


@dataclass(frozen=True)
class SumSO:
    var: str
    arity: int
    body: "WFormula"


@dataclass(frozen=True)
class ProdSO:
    var: str
    arity: int
    body: "WFormula"


WFormula = Union[BoolFormula, Const, WAtom, Plus, Times, SumFO, ProdFO, SumSO, ProdSO]


class Fragment(str, Enum):
    FO = "FO"
    SO = "SO"
    WFO = "wFO"
    WSO = "wSO"
    WESO = "wESO"


def is_bool(node) -> bool:
    return isinstance(node, BOOL_NODES)


def children(node) -> Iterator:
    if isinstance(node, (Or, Plus, Times)):
        yield from node.parts
    elif isinstance(node, (Not, ExistsFO, ExistsSO, SumFO, ProdFO, SumSO, ProdSO)):
        yield node.body


def free_split(node) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """Free first-order and free second-order variables of a formula."""
    if isinstance(node, Leq):
        return frozenset((node.left, node.right)), frozenset()
    if isinstance(node, (RAtom, WAtom)):
        return frozenset(node.args), frozenset()
    if isinstance(node, XAtom):
        return frozenset(node.args), frozenset((node.name,))
    if isinstance(node, Const):
        return frozenset(), frozenset()
    fo, so = frozenset(), frozenset()
    for child in children(node):
        cfo, cso = free_split(child)
        fo, so = fo | cfo, so | cso
    if isinstance(node, (ExistsFO, SumFO, ProdFO)):
        fo = fo - {node.var}
    elif isinstance(node, (ExistsSO, SumSO, ProdSO)):
        so = so - {node.var}
    return fo, so


def free_vars(node) -> FrozenSet[str]:
    fo, so = free_split(node)
    return fo | so


def _scan(node, negated: bool, seen: dict) -> None:
    if not is_bool(node):
        seen["weighted"] = True
    if isinstance(node, ProdSO):
        seen["universal_so"] = True
    elif isinstance(node, SumSO):
        seen["existential_so"] = True
    elif isinstance(node, ExistsSO):
        seen["universal_so" if negated else "existential_so"] = True
    for child in children(node):
        _scan(child, not negated if isinstance(node, Not) else negated, seen)


def classify(node) -> Fragment:
    """Tightest fragment containing the formula.

    An existential set quantifier under an odd number of negations is universal
    and puts the formula outside wESO.
    """
    seen: dict = {}
    _scan(node, False, seen)
    second_order = seen.get("universal_so") or seen.get("existential_so")
    if not seen.get("weighted"):
        return Fragment.SO if second_order else Fragment.FO
    if seen.get("universal_so"):
        return Fragment.WSO
    if seen.get("existential_so"):
        return Fragment.WESO
    return Fragment.WFO


def render(node) -> str:
    """Concrete syntax accepted by the formula parser."""
    if isinstance(node, Leq):
        return f"{node.left} <= {node.right}"
    if isinstance(node, (RAtom, XAtom, WAtom)):
        return f"{node.name}({','.join(node.args)})"
    if isinstance(node, Const):
        return literal(node.value)
    if isinstance(node, Not):
        return f"not {render(node.body)}"
    if isinstance(node, Or):
        return "(" + " or ".join(render(p) for p in node.parts) + ")"
    if isinstance(node, Plus):
        return "(" + " + ".join(render(p) for p in node.parts) + ")"
    if isinstance(node, Times):
        return "(" + " * ".join(render(p) for p in node.parts) + ")"
    if isinstance(node, ExistsFO):
        return f"exists {node.var}. {render(node.body)}"
    if isinstance(node, SumFO):
        return f"sum {node.var}. {render(node.body)}"
    if isinstance(node, ProdFO):
        return f"prod {node.var}. {render(node.body)}"
    if isinstance(node, ExistsSO):
        return f"existsset {node.var}/{node.arity}. {render(node.body)}"
    if isinstance(node, SumSO):
        return f"sumset {node.var}/{node.arity}. {render(node.body)}"
    if isinstance(node, ProdSO):
        return f"prodset {node.var}/{node.arity}. {render(node.body)}"
    raise TypeError(f"not a formula node: {node!r}")


def size(node) -> int:
    return 1 + sum(size(c) for c in children(node))


# --- sugar, lowered to the core connectives ---

def neg(body: BoolFormula) -> Not:
    return Not(body)


def disj(*parts: BoolFormula) -> BoolFormula:
    if not parts:
        raise ValueError("empty disjunction")
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def conj(*parts: BoolFormula) -> BoolFormula:
    if not parts:
        raise ValueError("empty conjunction")
    if len(parts) == 1:
        return parts[0]
    return Not(Or(tuple(Not(p) for p in parts)))


def implies(a: BoolFormula, b: BoolFormula) -> BoolFormula:
    return Or((Not(a), b))


def iff(a: BoolFormula, b: BoolFormula) -> BoolFormula:
    return conj(implies(a, b), implies(b, a))


def equals(x: str, y: str) -> BoolFormula:
    return conj(Leq(x, y), Leq(y, x))


def forall(var: str, body: BoolFormula) -> BoolFormula:
    return Not(ExistsFO(var, Not(body)))


def forall_set(var: str, arity: int, body: BoolFormula) -> BoolFormula:
    return Not(ExistsSO(var, arity, Not(body)))


def exists_many(variables, body: BoolFormula) -> BoolFormula:
    for v in reversed(list(variables)):
        body = ExistsFO(v, body)
    return body


def forall_many(variables, body: BoolFormula) -> BoolFormula:
    for v in reversed(list(variables)):
        body = forall(v, body)
    return body


def plus(*parts) -> "WFormula":
    if not parts:
        raise ValueError("empty sum")
    return parts[0] if len(parts) == 1 else Plus(tuple(parts))


def times(*parts) -> "WFormula":
    if not parts:
        raise ValueError("empty product")
    return parts[0] if len(parts) == 1 else Times(tuple(parts))
