# srtmkit/services/machine_builder.py
"""Assembling machines from small tape routines.

Cells of a built machine are (base, tag, marks) triples. The base is the
input symbol, the tag names the block of the encoding a cell belongs to and
marks are flags such as variable positions or a read pointer. Routines are
written against cell predicates; the builder expands them over the whole
tape alphabet.

Every routine starts and ends with the head on cell 0, which carries the
origin mark once the input has been tagged.
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from srtmkit.models.machine import ConstWeight, Machine, Transition
from srtmkit.models.semiring import SemiringRef, Value, get_semiring

logger = logging.getLogger(__name__)

BLANK = "_"
PLACEHOLDER = "X"
ORIGIN = "^"
POINTER = "p"
PREFIX = "P"
SEPARATOR = "S"


@dataclass(frozen=True)
class Cell:
    base: str
    tag: str = ""
    marks: FrozenSet[str] = field(default_factory=frozenset)

    @property
    def symbol(self) -> str:
        if not self.tag and not self.marks:
            return self.base
        return self.base + self.tag + "".join("." + m for m in sorted(self.marks))

    @property
    def is_prefix(self) -> bool:
        return self.tag == PREFIX

    @property
    def is_separator(self) -> bool:
        return self.tag == SEPARATOR

    @property
    def is_blank(self) -> bool:
        return self.base == BLANK and not self.tag

    def has(self, mark: str) -> bool:
        return mark in self.marks

    def plus(self, *marks: str) -> "Cell":
        return replace(self, marks=self.marks | frozenset(marks))

    def minus(self, *marks: str) -> "Cell":
        return replace(self, marks=self.marks - frozenset(marks))


RAW = tuple(Cell(s) for s in ("0", "1", PLACEHOLDER, BLANK))
Predicate = Callable[[Cell], bool]


def ANY(_c: Cell) -> bool:
    return True


def cursor(i: int) -> str:
    return f"c{i}"


def alphabet(prefix_marks: Sequence[str], blocks: Dict[str, Sequence[str]]) -> List[Cell]:
    """Raw input cells, prefix cells with any combination of marks, and tagged block cells."""
    cells = list(RAW)
    flags = list(prefix_marks) + [ORIGIN]
    for bits in itertools.product((False, True), repeat=len(flags)):
        cells.append(Cell("0", PREFIX, frozenset(f for f, b in zip(flags, bits) if b)))
    cells.append(Cell("1", SEPARATOR))
    for tag, bases in blocks.items():
        for base in bases:
            cells.append(Cell(base, tag))
            cells.append(Cell(base, tag, frozenset((POINTER,))))
    return cells


class MachineBuilder:
    def __init__(self, semiring: SemiringRef, cells: Iterable[Cell]):
        self.semiring = get_semiring(semiring)
        self.one = ConstWeight(self.semiring.one())
        self.zero = ConstWeight(self.semiring.zero())
        self.cells = list(dict.fromkeys(cells))
        self._symbols = {c.symbol for c in self.cells}
        self.transitions: Set[Transition] = set()
        self.states: Set[str] = set()
        self.known: Set[Value] = {self.one.value, self.zero.value}
        self._count = itertools.count()
        self._homes: Dict[str, str] = {}
        self._bounces: Dict[str, str] = {}
        self.sink = self.fresh("sink")
        self.fail = self.fresh("fail")
        self.reject(self.fail, ANY)

    def fresh(self, hint: str) -> str:
        name = f"{hint}{next(self._count)}"
        self.states.add(name)
        return name

    def on(
        self,
        state: str,
        when: Predicate,
        target: str,
        direction: int = 1,
        write: Optional[Callable[[Cell], Cell]] = None,
        weight=None,
    ) -> None:
        """For every cell matching `when`: write, move, enter `target`."""
        weight = weight or self.one
        if isinstance(weight, ConstWeight):
            self.known.add(weight.value)
        self.states.update((state, target))
        for c in self.cells:
            if not when(c):
                continue
            out = write(c) if write else c
            if out.symbol not in self._symbols:
                raise ValueError(f"routine writes {out.symbol}, which is not a tape symbol")
            self.transitions.add(Transition(state, c.symbol, target, out.symbol, direction, weight))

    def reject(self, state: str, when: Predicate) -> None:
        self.on(state, when, self.sink, weight=self.zero)

    # --- movement ---

    def bounce(self, target: str) -> str:
        """From cell 1, step back onto cell 0 into `target`."""
        if target not in self._bounces:
            state = self.fresh("back")
            self.on(state, ANY, target, direction=-1)
            self._bounces[target] = state
        return self._bounces[target]

    def home(self, target: str) -> str:
        if target not in self._homes:
            walk = self.fresh("home")
            self.on(walk, lambda c: not c.has(ORIGIN), walk, direction=-1)
            self.on(walk, lambda c: c.has(ORIGIN), self.bounce(target))
            self._homes[target] = walk
        return self._homes[target]

    def at_origin(self, target: str, write: Optional[Callable[[Cell], Cell]] = None, weight=None) -> str:
        """One step out and back from cell 0, rewriting it on the way."""
        state = self.fresh("origin")
        self.on(state, lambda c: c.has(ORIGIN), self.bounce(target), write=write, weight=weight)
        return state

    def prefix_map(self, write: Callable[[Cell], Cell], target: str) -> str:
        """Rewrite every prefix cell, then return home."""
        state = self.fresh("sweep")
        self.on(state, lambda c: c.is_prefix, state, write=write)
        self.on(state, lambda c: c.is_separator, self.home(target), direction=-1)
        return state

    def seek(self, until: Predicate, hint: str = "seek") -> str:
        """A state that walks right over cells failing `until`; callers add the rules for matching cells."""
        state = self.fresh(hint)
        self.on(state, lambda c: not until(c), state)
        return state

    # --- counting ---

    def odometer_step(self, k: int, ok: str, overflow: str) -> str:
        """Advance the cursor tuple (c1..ck over the prefix) to its lexicographic successor.

        Enters `ok` at cell 0, or clears all cursors and enters `overflow` after
        the last tuple.
        """
        cursors = [cursor(i) for i in range(1, k + 1)]
        finds = {i: self.fresh(f"find{i}_") for i in range(1, k + 1)}
        for i in range(k, 0, -1):
            mark = cursor(i)
            step = self.fresh(f"step{i}_")
            self.on(finds[i], lambda c, m=mark: c.is_prefix and not c.has(m), finds[i])
            self.on(finds[i], lambda c, m=mark: c.is_prefix and c.has(m), step, write=lambda c, m=mark: c.minus(m))
            self.reject(finds[i], lambda c: c.is_separator)
            self.on(step, lambda c: c.is_prefix, self.home(ok), direction=-1, write=lambda c, m=mark: c.plus(m))
            if i > 1:
                wrap = self.at_origin(finds[i - 1], write=lambda c, m=mark: c.plus(m))
            else:
                wrap = self.prefix_map(lambda c: c.minus(*cursors), overflow)
            self.on(step, lambda c: c.is_separator, self.home(wrap), direction=-1)
        return finds[k]

    def lookup(self, tag: str, args: Sequence[str]) -> Tuple[str, str]:
        """Move a pointer onto the cell of block `tag` indexed by the marked tuple `args`.

        Returns (entry, at_pointer): `at_pointer` walks right to the pointer;
        the caller adds its rules for cells carrying the pointer mark.
        """
        k = len(args)
        cursors = [cursor(i) for i in range(1, k + 1)]

        def mismatch(c: Cell) -> bool:
            return any(c.has(cur) != c.has(arg) for cur, arg in zip(cursors, args))

        same, differs = self.fresh("same"), self.fresh("differs")
        advance, put = self.fresh("advance"), self.fresh("put")
        at_pointer = self.fresh("pointer")
        place = self.seek(lambda c: c.tag == tag, "place")
        entry = self.at_origin(place, write=lambda c: c.plus(*cursors))
        self.on(place, lambda c: c.tag == tag, self.home(same), direction=-1, write=lambda c: c.plus(POINTER))

        self.on(same, lambda c: c.is_prefix and not mismatch(c), same)
        self.on(same, lambda c: c.is_prefix and mismatch(c), differs)
        self.on(differs, lambda c: c.is_prefix, differs)
        found = self.prefix_map(lambda c: c.minus(*cursors), at_pointer)
        self.on(same, lambda c: c.is_separator, self.home(found), direction=-1)
        self.on(differs, lambda c: c.is_separator, self.home(advance), direction=-1)

        self.on(advance, lambda c: not c.has(POINTER), advance)
        self.on(advance, lambda c: c.has(POINTER), put, write=lambda c: c.minus(POINTER))
        step = self.odometer_step(k, same, self.fail)
        self.on(put, lambda c: c.tag == tag, self.home(step), direction=-1, write=lambda c: c.plus(POINTER))
        self.reject(put, lambda c: c.tag != tag)

        self.on(at_pointer, lambda c: not c.has(POINTER), at_pointer)
        return entry, at_pointer

    # --- output ---

    def build(self, initial_state: str) -> Machine:
        machine = Machine(
            semiring=self.semiring.name,
            known_values=frozenset(self.known),
            states=frozenset(self.states),
            input_alphabet=frozenset(("0", "1")),
            tape_alphabet=frozenset(self._symbols),
            initial_state=initial_state,
            blank=BLANK,
            placeholder=PLACEHOLDER,
            transitions=frozenset(self.transitions),
        )
        logger.debug(
            "built machine: %d states, %d symbols, %d transitions",
            len(self.states), len(self._symbols), len(self.transitions),
        )
        return machine
