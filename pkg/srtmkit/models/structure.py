# srtmkit/models/structure.py
"""Finite ordered structures over the universe 0..n-1 and their word encoding."""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from config import Config
from srtmkit.errors import SignatureMismatch, TooLarge
from srtmkit.models.machine import Letter, Weight, WeightedWord
from srtmkit.models.semiring import Value
from srtmkit.schemas.models import Diagnostic, DiagnosticCode

logger = logging.getLogger(__name__)

Tup = Tuple[int, ...]


@dataclass(frozen=True)
class Signature:
    bool_relations: Tuple[Tuple[str, int], ...] = ()
    weighted_relations: Tuple[Tuple[str, int], ...] = ()

    def arity(self, name: str) -> Optional[int]:
        for rel, k in self.bool_relations + self.weighted_relations:
            if rel == name:
                return k
        return None

    def is_bool(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.bool_relations)

    def is_weighted(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.weighted_relations)

    def overlapping_names(self) -> List[str]:
        bools = {rel for rel, _ in self.bool_relations}
        return sorted(bools & {rel for rel, _ in self.weighted_relations})


@dataclass(frozen=True)
class RelationValue:
    """An interpretation of a relation variable: a set of tuples of fixed arity."""
    arity: int
    tuples: FrozenSet[Tup] = frozenset()

    def __contains__(self, t) -> bool:
        return tuple(t) in self.tuples


@dataclass(frozen=True, eq=False)
class OrderedStructure:
    size: int
    semiring: str
    bool_rels: Dict[str, FrozenSet[Tup]] = field(default_factory=dict)
    weighted_rels: Dict[str, Dict[Tup, Value]] = field(default_factory=dict)

    def holds(self, name: str, t: Tup) -> bool:
        return t in self.bool_rels.get(name, frozenset())

    def weight(self, name: str, t: Tup) -> Value:
        return self.weighted_rels[name][t]


@dataclass(frozen=True)
class Assignment:
    first_order: Dict[str, int] = field(default_factory=dict)
    second_order: Dict[str, RelationValue] = field(default_factory=dict)

    def with_element(self, var: str, a: int) -> "Assignment":
        return Assignment({**self.first_order, var: a}, self.second_order)

    def with_relation(self, var: str, rel: RelationValue) -> "Assignment":
        return Assignment(self.first_order, {**self.second_order, var: rel})


def enumerate_tuples_lex(n: int, k: int) -> List[Tup]:
    return list(itertools.product(range(n), repeat=k))


def iter_relations_lex(n: int, k: int, cap: Optional[int] = None) -> Iterator[FrozenSet[Tup]]:
    """Subsets of A^k by their characteristic vector read as a binary numeral.

    The least tuple is the most significant bit, so the empty set comes first
    and the full set last.
    """
    cap = Config.SO_CAP if cap is None else cap
    tuples = enumerate_tuples_lex(n, k)
    width = len(tuples)
    if width > cap:
        raise TooLarge(f"{n}^{k} = {width} base tuples exceed the second-order cap {cap}")
    for code in range(1 << width):
        yield frozenset(t for i, t in enumerate(tuples) if code >> (width - 1 - i) & 1)


def enumerate_relations_lex(n: int, k: int, cap: Optional[int] = None) -> List[FrozenSet[Tup]]:
    return list(iter_relations_lex(n, k, cap))


def validate_structure(a: OrderedStructure, sig: Signature) -> List[Diagnostic]:
    out: List[Diagnostic] = []

    def flag(code: DiagnosticCode, message: str) -> None:
        out.append(Diagnostic(code=code, message=message))

    if a.size < 1:
        flag(DiagnosticCode.EMPTY_UNIVERSE, f"universe size must be at least 1, got {a.size}")
    for name in sig.overlapping_names():
        flag(DiagnosticCode.OVERLAPPING_NAMES, f"'{name}' is both a Boolean and a weighted relation")

    for name in sorted(a.bool_rels):
        if not sig.is_bool(name):
            flag(DiagnosticCode.UNKNOWN_RELATION, f"relation '{name}' is not in the signature")
    for name in sorted(a.weighted_rels):
        if not sig.is_weighted(name):
            flag(DiagnosticCode.UNKNOWN_RELATION, f"weighted relation '{name}' is not in the signature")

    for name, k in sig.bool_relations:
        if name not in a.bool_rels:
            flag(DiagnosticCode.MISSING_RELATION, f"relation '{name}' has no interpretation")
            continue
        for t in sorted(a.bool_rels[name]):
            _check_tuple(flag, name, t, k, a.size)

    for name, k in sig.weighted_relations:
        if name not in a.weighted_rels:
            flag(DiagnosticCode.MISSING_RELATION, f"weighted relation '{name}' has no interpretation")
            continue
        table = a.weighted_rels[name]
        for t in sorted(table):
            _check_tuple(flag, name, t, k, a.size)
            if table[t].semiring != a.semiring:
                flag(DiagnosticCode.MIXED_SEMIRINGS, f"{name}{t} is over {table[t].semiring}")
        if a.size >= 1:
            missing = [t for t in enumerate_tuples_lex(a.size, k) if t not in table]
            if missing:
                flag(DiagnosticCode.PARTIAL_WEIGHTED_RELATION,
                     f"weighted relation '{name}' has no value for {len(missing)} tuple(s), first {missing[0]}")
    return out


def _check_tuple(flag, name: str, t: Tup, k: int, n: int) -> None:
    if len(t) != k:
        flag(DiagnosticCode.TUPLE_ARITY, f"{name}{t} has arity {len(t)}, expected {k}")
    elif any(c < 0 or c >= n for c in t):
        flag(DiagnosticCode.TUPLE_OUT_OF_RANGE, f"{name}{t} leaves the universe 0..{n - 1}")


FreeValue = Union[int, RelationValue]


def _bits(n: int, k: int, tuples) -> List[Letter]:
    return [Letter("1" if t in tuples else "0") for t in enumerate_tuples_lex(n, k)]


def encode_structure(
    a: OrderedStructure, sig: Signature, free_values: Sequence[FreeValue] = ()
) -> WeightedWord:
    """0^n 1, Boolean relation bit blocks, weighted relation value blocks, free values."""
    diagnostics = validate_structure(a, sig)
    if diagnostics:
        raise SignatureMismatch("; ".join(f"{d.code.value}: {d.message}" for d in diagnostics))
    n = a.size
    tokens: List = [Letter("0")] * n + [Letter("1")]
    for name, k in sig.bool_relations:
        tokens.extend(_bits(n, k, a.bool_rels[name]))
    for name, k in sig.weighted_relations:
        table = a.weighted_rels[name]
        tokens.extend(Weight(table[t]) for t in enumerate_tuples_lex(n, k))
    for value in free_values:
        if isinstance(value, RelationValue):
            tokens.extend(_bits(n, value.arity, value.tuples))
        else:
            if not 0 <= value < n:
                raise SignatureMismatch(f"free element {value} is outside the universe 0..{n - 1}")
            tokens.extend(_bits(n, 1, {(value,)}))
    return WeightedWord(tuple(tokens))
