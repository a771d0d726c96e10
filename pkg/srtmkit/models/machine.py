# srtmkit/models/machine.py
"""Semiring Turing machines: transitions, machines, weighted words, configurations."""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from srtmkit.models.semiring import Value, get_semiring, literal
from srtmkit.schemas.models import Diagnostic, DiagnosticCode


@dataclass(frozen=True)
class ConstWeight:
    value: Value

    def serialize(self) -> str:
        return literal(self.value)


@dataclass(frozen=True)
class FromCell:
    """The placeholder weight: the annotation of the cell under the head."""

    def serialize(self) -> str:
        return "@cell"


@dataclass(frozen=True)
class LimRec:
    values: FrozenSet[Value]

    def serialize(self) -> str:
        return "rec{" + ",".join(sorted(literal(v) for v in self.values)) + "}"


WeightSpec = Union[ConstWeight, FromCell, LimRec]


@dataclass(frozen=True)
class Transition:
    from_state: str
    read: str
    to_state: str
    write: str
    direction: int
    weight: WeightSpec

    def serialize(self) -> str:
        sign = "+1" if self.direction > 0 else "-1"
        return (
            f"{self.from_state},{self.read} -> {self.to_state},{self.write}, "
            f"{sign}, {self.weight.serialize()}"
        )


@dataclass(frozen=True)
class Machine:
    semiring: str
    known_values: FrozenSet[Value]
    states: FrozenSet[str]
    input_alphabet: FrozenSet[str]
    tape_alphabet: FrozenSet[str]
    initial_state: str
    blank: str
    placeholder: str
    transitions: FrozenSet[Transition]
    oracle_enabled: bool = False

    @cached_property
    def index(self) -> Dict[Tuple[str, str], Tuple[Transition, ...]]:
        """(state, symbol) -> applicable transitions in canonical order."""
        grouped: Dict[Tuple[str, str], List[Transition]] = {}
        for t in self.transitions:
            grouped.setdefault((t.from_state, t.read), []).append(t)
        return {
            key: tuple(sorted(ts, key=Transition.serialize))
            for key, ts in grouped.items()
        }

    @cached_property
    def halting_states(self) -> FrozenSet[str]:
        busy = {t.from_state for t in self.transitions}
        return frozenset(q for q in self.states if q not in busy)

    def with_transitions(self, transitions) -> "Machine":
        return Machine(
            semiring=self.semiring,
            known_values=self.known_values,
            states=self.states,
            input_alphabet=self.input_alphabet,
            tape_alphabet=self.tape_alphabet,
            initial_state=self.initial_state,
            blank=self.blank,
            placeholder=self.placeholder,
            transitions=frozenset(transitions),
            oracle_enabled=self.oracle_enabled,
        )


@dataclass(frozen=True)
class Letter:
    symbol: str

    def render(self) -> str:
        return self.symbol


@dataclass(frozen=True)
class Weight:
    value: Value

    def render(self) -> str:
        return literal(self.value)


Token = Union[Letter, Weight]


@dataclass(frozen=True)
class WeightedWord:
    tokens: Tuple[Token, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    def render(self) -> str:
        return " ".join(t.render() for t in self.tokens)

    def value_at(self, i: int) -> Optional[Value]:
        if 0 <= i < len(self.tokens) and isinstance(self.tokens[i], Weight):
            return self.tokens[i].value
        return None


@dataclass(frozen=True)
class Configuration:
    state: str
    symbols: Tuple[str, ...]
    annotations: Tuple[Value, ...]
    head: int
    blank: str = field(compare=False, default="_")
    zero: Optional[Value] = field(compare=False, default=None)

    def symbol_at(self, i: int) -> str:
        return self.symbols[i] if i < len(self.symbols) else self.blank

    def annotation_at(self, i: int) -> Value:
        return self.annotations[i] if i < len(self.annotations) else self.zero

    @property
    def current_symbol(self) -> str:
        return self.symbol_at(self.head)

    def canonical_key(self):
        symbols = list(self.symbols)
        while symbols and symbols[-1] == self.blank:
            symbols.pop()
        return (self.state, tuple(symbols), self.head)


@dataclass(frozen=True)
class RecognitionFn:
    values: FrozenSet[Value]


def validate_machine(m: Machine) -> List[Diagnostic]:
    out: List[Diagnostic] = []

    def flag(code: DiagnosticCode, message: str) -> None:
        out.append(Diagnostic(code=code, message=message))

    if m.blank in m.input_alphabet:
        flag(DiagnosticCode.BLANK_IN_INPUT_ALPHABET, f"blank '{m.blank}' is an input letter")
    if m.placeholder in m.input_alphabet:
        flag(DiagnosticCode.PLACEHOLDER_IN_INPUT_ALPHABET,
             f"placeholder '{m.placeholder}' is an input letter")
    if m.blank == m.placeholder:
        flag(DiagnosticCode.BLANK_IS_PLACEHOLDER, f"blank and placeholder are both '{m.blank}'")
    for letter in sorted(m.input_alphabet - m.tape_alphabet):
        flag(DiagnosticCode.INPUT_NOT_IN_TAPE_ALPHABET, f"input letter '{letter}' missing from tape alphabet")
    if m.blank not in m.tape_alphabet:
        flag(DiagnosticCode.BLANK_NOT_IN_TAPE_ALPHABET, f"blank '{m.blank}' missing from tape alphabet")
    if m.placeholder not in m.tape_alphabet:
        flag(DiagnosticCode.PLACEHOLDER_NOT_IN_TAPE_ALPHABET,
             f"placeholder '{m.placeholder}' missing from tape alphabet")
    if m.initial_state not in m.states:
        flag(DiagnosticCode.UNKNOWN_INITIAL_STATE, f"initial state '{m.initial_state}' is not a state")

    for v in sorted(m.known_values, key=repr):
        if v.semiring != m.semiring:
            flag(DiagnosticCode.MIXED_SEMIRINGS, f"known value {v} is over {v.semiring}, not {m.semiring}")

    semiring = get_semiring(m.semiring)
    for t in sorted(m.transitions, key=Transition.serialize):
        where = t.serialize()
        for q in (t.from_state, t.to_state):
            if q not in m.states:
                flag(DiagnosticCode.UNKNOWN_STATE, f"{where}: unknown state '{q}'")
        for s in (t.read, t.write):
            if s not in m.tape_alphabet:
                flag(DiagnosticCode.UNKNOWN_TAPE_SYMBOL, f"{where}: unknown symbol '{s}'")
        if t.direction not in (-1, 1):
            flag(DiagnosticCode.BAD_DIRECTION, f"{where}: direction must be -1 or +1")
        w = t.weight
        if isinstance(w, ConstWeight):
            if w.value.semiring != semiring.name:
                flag(DiagnosticCode.MIXED_SEMIRINGS, f"{where}: weight is over {w.value.semiring}")
            elif w.value not in m.known_values:
                flag(DiagnosticCode.UNKNOWN_CONSTANT_WEIGHT, f"{where}: weight {w.value} is not a known value")
        elif isinstance(w, LimRec):
            if not m.oracle_enabled:
                flag(DiagnosticCode.ORACLE_NOT_ENABLED, f"{where}: recognition weight without oracle access")
            for v in w.values:
                if v.semiring != semiring.name:
                    flag(DiagnosticCode.MIXED_SEMIRINGS, f"{where}: recognition value over {v.semiring}")
    return out
