# srtmkit/parsers/text_formats.py
"""Plain-text formats for machines, weighted words, structures and signatures.

Machine files are `key: value` header lines followed by one transition per
line, `q,s -> q',s', d, w`, where w is `#literal`, `@cell` or
`rec{#v1,#v2,...}`. `%` starts a comment everywhere.
"""
import logging
import re
from typing import Callable, Dict, List, Optional, Tuple

import sympy
from sympy.parsing.sympy_parser import parse_expr

from srtmkit.errors import BadLiteral, FormatError
from srtmkit.models.machine import (
    ConstWeight,
    FromCell,
    Letter,
    LimRec,
    Machine,
    Transition,
    Weight,
    WeightedWord,
)
from srtmkit.models.semiring import SemiringRef, get_semiring, literal, parse_literal
from srtmkit.models.structure import (
    OrderedStructure,
    RelationValue,
    Signature,
    enumerate_tuples_lex,
    validate_structure,
)

logger = logging.getLogger(__name__)

HEADER_KEYS = ("states", "input_alphabet", "tape_alphabet", "init", "blank", "placeholder", "known", "oracle")
_LITERAL_LIST = re.compile(r"#\{[^}]*\}|#[^,\s}]+")


def _lines(text: str):
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("%", 1)[0].strip()
        if line:
            yield number, line


def _items(value: str) -> List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


# --- machines ---

def _weight(spec: str, semiring: SemiringRef, where: str):
    spec = spec.strip()
    if spec == "@cell":
        return FromCell()
    if spec.startswith("rec{") and spec.endswith("}"):
        return LimRec(frozenset(parse_literal(v, semiring) for v in _LITERAL_LIST.findall(spec[4:-1])))
    if spec.startswith("#"):
        return ConstWeight(parse_literal(spec, semiring))
    raise FormatError(f"{where}: weight must be #literal, @cell or rec{{...}}, got '{spec}'")


def _direction(text: str, where: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise FormatError(f"{where}: direction must be -1 or +1, got '{text.strip()}'")


def parse_machine(text: str, semiring: SemiringRef) -> Machine:
    semiring = get_semiring(semiring)
    header: Dict[str, str] = {}
    transitions = set()
    for number, line in _lines(text):
        where = f"line {number}"
        if "->" in line:
            left, right = line.split("->", 1)
            source = left.split(",", 1)
            target = right.split(",", 3)
            if len(source) != 2 or len(target) != 4:
                raise FormatError(f"{where}: transitions read 'q,s -> q2,s2, d, w'")
            try:
                weight = _weight(target[3], semiring, where)
            except BadLiteral as e:
                raise FormatError(f"{where}: {e}") from e
            transitions.add(
                Transition(
                    from_state=source[0].strip(),
                    read=source[1].strip(),
                    to_state=target[0].strip(),
                    write=target[1].strip(),
                    direction=_direction(target[2], where),
                    weight=weight,
                )
            )
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in HEADER_KEYS:
            raise FormatError(f"{where}: expected one of {', '.join(HEADER_KEYS)} or a transition")
        header[key] = value.strip()

    missing = [k for k in HEADER_KEYS if k not in header and k != "oracle"]
    if missing:
        raise FormatError(f"machine header is missing {', '.join(missing)}")
    known = frozenset(parse_literal(v, semiring) for v in _LITERAL_LIST.findall(header["known"]))
    machine = Machine(
        semiring=semiring.name,
        known_values=known,
        states=frozenset(_items(header["states"])),
        input_alphabet=frozenset(_items(header["input_alphabet"])),
        tape_alphabet=frozenset(_items(header["tape_alphabet"])),
        initial_state=header["init"],
        blank=header["blank"],
        placeholder=header["placeholder"],
        transitions=frozenset(transitions),
        oracle_enabled=header.get("oracle", "no").lower() in ("yes", "true", "1"),
    )
    logger.debug("parsed machine with %d states and %d transitions", len(machine.states), len(transitions))
    return machine


def render_machine(m: Machine) -> str:
    lines = [
        f"states: {', '.join(sorted(m.states))}",
        f"input_alphabet: {', '.join(sorted(m.input_alphabet))}",
        f"tape_alphabet: {', '.join(sorted(m.tape_alphabet))}",
        f"init: {m.initial_state}",
        f"blank: {m.blank}",
        f"placeholder: {m.placeholder}",
        f"known: {', '.join(sorted(literal(v) for v in m.known_values))}",
    ]
    if m.oracle_enabled:
        lines.append("oracle: yes")
    lines.extend(t.serialize() for t in sorted(m.transitions, key=Transition.serialize))
    return "\n".join(lines) + "\n"


# --- weighted words ---

def parse_word(text: str, semiring: SemiringRef) -> WeightedWord:
    tokens = []
    for token in text.split():
        if token.startswith("#"):
            tokens.append(Weight(parse_literal(token, semiring)))
        else:
            tokens.append(Letter(token))
    return WeightedWord(tuple(tokens))


def render_word(word: WeightedWord) -> str:
    return word.render()


# --- signatures and structures ---

_DECL = re.compile(r"^(rel|wrel)\s+([A-Za-z_][A-Za-z0-9_]*)\s*/\s*([0-9]+)$")
_TUPLE = re.compile(r"\(([^)]*)\)")
_WEIGHTED_ENTRY = re.compile(r"\(([^)]*)\)\s*=\s*(#\{[^}]*\}|#[^,\s]+)")


def _tuple(text: str, where: str) -> tuple:
    try:
        return tuple(int(c) for c in _items(text))
    except ValueError:
        raise FormatError(f"{where}: tuple components must be natural numbers, got '({text})'")


def parse_signature(text: str) -> Signature:
    bools, weighted = [], []
    for number, line in _lines(text):
        match = _DECL.match(line.rstrip(":").strip())
        if not match:
            raise FormatError(f"line {number}: expected 'rel R/k' or 'wrel W/k'")
        kind, name, arity = match.group(1), match.group(2), int(match.group(3))
        if arity < 1:
            raise FormatError(f"line {number}: arity of {name} must be at least 1")
        (bools if kind == "rel" else weighted).append((name, arity))
    return Signature(tuple(bools), tuple(weighted))


def render_signature(sig: Signature) -> str:
    lines = [f"rel {name}/{k}" for name, k in sig.bool_relations]
    lines += [f"wrel {name}/{k}" for name, k in sig.weighted_relations]
    return "\n".join(lines) + "\n"


def parse_structure(text: str, semiring: SemiringRef) -> Tuple[OrderedStructure, Signature]:
    """Structure file; the signature is read off its relation declarations."""
    semiring = get_semiring(semiring)
    size: Optional[int] = None
    bools, weighted = [], []
    bool_rels: Dict[str, frozenset] = {}
    weighted_rels: Dict[str, Dict[tuple, object]] = {}
    for number, line in _lines(text):
        where = f"line {number}"
        head, sep, body = line.partition(":")
        head = head.strip()
        if head == "size":
            try:
                size = int(body.strip())
            except ValueError:
                raise FormatError(f"{where}: size must be a natural number")
            continue
        match = _DECL.match(head)
        if not sep or not match:
            raise FormatError(f"{where}: expected 'size: n', 'rel R/k: ...' or 'wrel W/k: ...'")
        kind, name, arity = match.group(1), match.group(2), int(match.group(3))
        if kind == "rel":
            bools.append((name, arity))
            bool_rels[name] = frozenset(_tuple(t, where) for t in _TUPLE.findall(body))
        else:
            weighted.append((name, arity))
            table = {}
            for t, v in _WEIGHTED_ENTRY.findall(body):
                try:
                    table[_tuple(t, where)] = parse_literal(v, semiring)
                except BadLiteral as e:
                    raise FormatError(f"{where}: {e}") from e
            weighted_rels[name] = table
    if size is None:
        raise FormatError("structure file has no 'size:' line")
    structure = OrderedStructure(size, semiring.name, bool_rels, weighted_rels)
    sig = Signature(tuple(bools), tuple(weighted))
    diagnostics = validate_structure(structure, sig)
    if diagnostics:
        raise FormatError("; ".join(f"{d.code.value}: {d.message}" for d in diagnostics))
    return structure, sig


def render_structure(a: OrderedStructure, sig: Signature) -> str:
    lines = [f"size: {a.size}"]
    for name, k in sig.bool_relations:
        tuples = sorted(a.bool_rels.get(name, ()))
        lines.append(f"rel {name}/{k}: " + ", ".join("(" + ",".join(map(str, t)) + ")" for t in tuples))
    for name, k in sig.weighted_relations:
        table = a.weighted_rels.get(name, {})
        entries = [
            "(" + ",".join(map(str, t)) + ")=" + literal(table[t])
            for t in enumerate_tuples_lex(a.size, k)
            if t in table
        ]
        lines.append(f"wrel {name}/{k}: " + ", ".join(entries))
    return "\n".join(lines) + "\n"


# --- free variable assignments ---

_ASSIGN = re.compile(r"([A-Za-z_][A-Za-z0-9_']*)\s*=\s*(\{[^}]*\}|[0-9]+)")


def parse_assignment(text: str) -> Dict[str, object]:
    """`x=1, X={(0),(1)}` -> {x: 1, X: RelationValue}."""
    out: Dict[str, object] = {}
    text = (text or "").strip()
    if not text:
        return out
    consumed = _ASSIGN.sub("", text).replace(",", "").strip()
    if consumed:
        raise FormatError(f"cannot read assignment '{text}'; use x=1,X={{(0),(1)}}")
    for name, value in _ASSIGN.findall(text):
        if value.startswith("{"):
            tuples = [_tuple(t, "assignment") for t in _TUPLE.findall(value)]
            arities = {len(t) for t in tuples}
            if len(arities) > 1:
                raise FormatError(f"assignment to {name} mixes arities")
            arity = arities.pop() if arities else 1
            out[name] = RelationValue(arity, frozenset(tuples))
        else:
            out[name] = int(value)
    return out


# --- budgets ---

_N = sympy.Symbol("n")
_DIGITS = re.compile(r"[0-9]+")


def parse_budget(text: str) -> Callable[[int], int]:
    """An integer, or a polynomial in the input length n such as `2*n**2+5`."""
    text = str(text).strip()
    if not text.isascii():
        raise FormatError(f"budget '{text}' must be written in ASCII")
    if _DIGITS.fullmatch(text):
        fixed = int(text)
        return lambda _n: fixed
    try:
        expr = parse_expr(text.replace("^", "**"), local_dict={"n": _N}, evaluate=True)
    except Exception as e:  # sympy raises a variety of parser errors
        raise FormatError(f"budget '{text}' is neither an integer nor a polynomial in n: {e}") from e
    if not isinstance(expr, sympy.Expr) or expr.free_symbols - {_N}:
        raise FormatError(f"budget '{text}' may only mention n")
    poly = sympy.Poly(expr, _N)
    if any(not c.is_Integer or c < 0 for c in poly.all_coeffs()):
        raise FormatError(f"budget '{text}' needs natural coefficients")
    return lambda n: int(expr.subs(_N, n))
