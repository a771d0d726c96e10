# srtmkit/services/simulator.py
"""Execution of semiring Turing machines and computation of machine values."""
import logging
from typing import Dict, List, Optional, Tuple

from config import Config
from srtmkit.errors import BudgetExceeded, InvalidMachine, LetterNotInInputAlphabet, NotApplicable
from srtmkit.models.machine import (
    Configuration,
    ConstWeight,
    FromCell,
    LimRec,
    Letter,
    Machine,
    RecognitionFn,
    Transition,
    WeightedWord,
    validate_machine,
)
from srtmkit.models.semiring import Value, fold_add, get_semiring, literal

logger = logging.getLogger(__name__)

Path = Tuple[Transition, ...]


def rec_apply(f: RecognitionFn, x: Value) -> Value:
    """Limited recognition: the sum of the known values, plus x when x is not one of them."""
    total = fold_add(sorted(f.values, key=repr), x.semiring)
    if x in f.values:
        return total
    return get_semiring(x.semiring).add(x, total)


def initial_configuration(m: Machine, s: WeightedWord) -> Configuration:
    semiring = get_semiring(m.semiring)
    zero = semiring.zero()
    symbols: List[str] = []
    annotations: List[Value] = []
    for i, token in enumerate(s.tokens):
        if isinstance(token, Letter):
            if token.symbol not in m.input_alphabet:
                raise LetterNotInInputAlphabet(
                    f"input position {i}: '{token.symbol}' is not in the input alphabet"
                )
            symbols.append(token.symbol)
            annotations.append(zero)
        else:
            semiring._own(token.value)
            symbols.append(m.placeholder)
            annotations.append(token.value)
    return Configuration(
        state=m.initial_state,
        symbols=tuple(symbols),
        annotations=tuple(annotations),
        head=0,
        blank=m.blank,
        zero=zero,
    )


def applicable_transitions(m: Machine, c: Configuration) -> List[Transition]:
    return list(m.index.get((c.state, c.current_symbol), ()))


def transition_weight(m: Machine, c: Configuration, t: Transition) -> Value:
    w = t.weight
    if isinstance(w, ConstWeight):
        return w.value
    annotation = c.annotation_at(c.head)
    if isinstance(w, FromCell):
        return annotation
    if isinstance(w, LimRec):
        return rec_apply(RecognitionFn(w.values), annotation)
    raise NotApplicable(f"unknown weight specification {w!r}")


def _apply(c: Configuration, t: Transition) -> Configuration:
    symbols = list(c.symbols)
    if c.head >= len(symbols):
        symbols.extend([c.blank] * (c.head + 1 - len(symbols)))
    symbols[c.head] = t.write
    head = abs(c.head + t.direction)
    if head >= len(symbols):
        symbols.extend([c.blank] * (head + 1 - len(symbols)))
    return Configuration(
        state=t.to_state,
        symbols=tuple(symbols),
        annotations=c.annotations,
        head=head,
        blank=c.blank,
        zero=c.zero,
    )


def step(m: Machine, c: Configuration, t: Transition) -> Tuple[Configuration, Value]:
    """Apply one transition; the head lands on |n + d|."""
    if t not in applicable_transitions(m, c):
        raise NotApplicable(
            f"{t.serialize()} does not apply in state '{c.state}' reading '{c.current_symbol}'"
        )
    return _apply(c, t), transition_weight(m, c, t)


def require_valid(m: Machine) -> None:
    diagnostics = validate_machine(m)
    if diagnostics:
        raise InvalidMachine(diagnostics)
    for v in unused_known_values(m):
        logger.warning("known value %s is not used by any transition weight", literal(v))


def unused_known_values(m: Machine) -> List[Value]:
    used = set()
    for t in m.transitions:
        if isinstance(t.weight, ConstWeight):
            used.add(t.weight.value)
        elif isinstance(t.weight, LimRec):
            used.update(t.weight.values)
    return sorted(m.known_values - used, key=repr)


class _Frame:
    __slots__ = ("config", "depth", "via", "todo", "acc", "height", "pending")

    def __init__(self, config: Configuration, depth: int, via: Optional[Transition]):
        self.config = config
        self.depth = depth
        self.via = via
        self.todo: Optional[List[Transition]] = None
        self.acc: Optional[Value] = None
        self.height = 0
        self.pending: Optional[Value] = None


def _stack_path(stack: List[_Frame]) -> Path:
    return tuple(f.via for f in stack if f.via is not None)


def machine_value_from(
    m: Machine,
    start: Configuration,
    budget: int,
    memoize: Optional[bool] = None,
) -> Value:
    """Sum over computation paths from `start` of the product of their weights.

    Depth first over the computation tree with an explicit stack. With memoization
    on, finished configurations are cached with their value and the length of
    their longest path so the budget is still enforced on cache hits.
    """
    if budget < 0:
        raise ValueError("budget must be a natural number")
    semiring = get_semiring(m.semiring)
    use_memo = Config.MEMOIZE if memoize is None else memoize
    memo: Dict[tuple, Tuple[Value, int]] = {}
    result: Optional[Tuple[Value, int]] = None

    stack = [_Frame(start, 0, None)]
    while stack:
        frame = stack[-1]
        if frame.todo is None:
            ts = applicable_transitions(m, frame.config)
            if not ts:
                finished = (semiring.one(), 0)
                stack.pop()
                result = finished
                if stack:
                    _deliver(stack[-1], finished, semiring)
                continue
            if frame.depth >= budget:
                raise BudgetExceeded(budget, _stack_path(stack))
            frame.todo = list(reversed(ts))
            frame.acc = semiring.zero()

        if frame.todo:
            t = frame.todo.pop()
            child = _apply(frame.config, t)
            weight = transition_weight(m, frame.config, t)
            if use_memo:
                hit = memo.get(child.canonical_key())
                if hit is not None:
                    value, height = hit
                    if frame.depth + 1 + height > budget:
                        raise BudgetExceeded(budget, _stack_path(stack) + (t,))
                    frame.pending = weight
                    _deliver(frame, hit, semiring)
                    continue
            frame.pending = weight
            stack.append(_Frame(child, frame.depth + 1, t))
            continue

        finished = (frame.acc, frame.height)
        if use_memo:
            memo[frame.config.canonical_key()] = finished
        stack.pop()
        result = finished
        if stack:
            _deliver(stack[-1], finished, semiring)

    logger.debug("machine value computed, %d memo entries", len(memo))
    return result[0]


def _deliver(parent: _Frame, finished: Tuple[Value, int], semiring) -> None:
    value, height = finished
    parent.acc = semiring.add(parent.acc, semiring.mul(parent.pending, value))
    parent.height = max(parent.height, height + 1)
    parent.pending = None


def machine_value(m: Machine, s: WeightedWord, budget: int, memoize: Optional[bool] = None) -> Value:
    require_valid(m)
    start = initial_configuration(m, s)
    logger.debug("evaluating machine on '%s' with budget %d", s.render(), budget)
    return machine_value_from(m, start, budget, memoize)


def enumerate_paths(m: Machine, s: WeightedWord, budget: int) -> List[Tuple[Path, Value]]:
    """Every maximal computation path with the product of its weights, in canonical order."""
    require_valid(m)
    semiring = get_semiring(m.semiring)
    out: List[Tuple[Path, Value]] = []
    stack: List[Tuple[Configuration, Path, Value]] = [
        (initial_configuration(m, s), (), semiring.one())
    ]
    while stack:
        c, path, weight = stack.pop()
        ts = applicable_transitions(m, c)
        if not ts:
            out.append((path, weight))
            continue
        if len(path) >= budget:
            raise BudgetExceeded(budget, path)
        for t in reversed(ts):
            stack.append((_apply(c, t), path + (t,), semiring.mul(weight, transition_weight(m, c, t))))
    return out
