# srtmkit/services/corpus.py
"""Reference machines, their closed forms, and the shipped corpus files."""
import logging
import os
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from config import Config
from srtmkit.errors import FormatError
from srtmkit.models.machine import ConstWeight, FromCell, LimRec, Letter, Machine, Transition, Weight, WeightedWord
from srtmkit.models.semiring import SemiringRef, Value, fold_mul, get_semiring
from srtmkit.models.structure import OrderedStructure, Signature
from srtmkit.parsers.formula_parser import parse_formula
from srtmkit.parsers.text_formats import parse_machine, parse_signature, parse_structure

logger = logging.getLogger(__name__)

BLANK = "_"
PLACEHOLDER = "X"


def _machine(
    semiring: SemiringRef,
    states: Iterable[str],
    letters: Iterable[str],
    initial: str,
    rules: Sequence[Tuple[str, str, str, str, int, object]],
    oracle: bool = False,
    known: Iterable[Value] = (),
) -> Machine:
    s = get_semiring(semiring)
    letters = frozenset(letters)
    transitions = frozenset(Transition(*rule) for rule in rules)
    known = set(known) | {t.weight.value for t in transitions if isinstance(t.weight, ConstWeight)}
    return Machine(
        semiring=s.name,
        known_values=frozenset(known | {s.one()}),
        states=frozenset(states),
        input_alphabet=letters,
        tape_alphabet=letters | {PLACEHOLDER, BLANK},
        initial_state=initial,
        blank=BLANK,
        placeholder=PLACEHOLDER,
        transitions=transitions,
        oracle_enabled=oracle,
    )


# --- conditional product ---

def conditional_product_machine(semiring: SemiringRef = "nat", letters: Sequence[str] = ("a",)) -> Machine:
    """Letters s1..sm followed by values v1..vm give v1*...*vm; anything else gives zero.

    Each round erases the leftmost letter, walks right to the end, erases the
    rightmost value with that value as weight and walks back.
    """
    s = get_semiring(semiring)
    one, zero = ConstWeight(s.one()), ConstWeight(s.zero())
    rules = [
        ("init", PLACEHOLDER, "fin", PLACEHOLDER, 1, zero),
        ("init", BLANK, "fin", BLANK, 1, one),
        ("right", PLACEHOLDER, "right", PLACEHOLDER, 1, one),
        ("right", BLANK, "turn_left", BLANK, -1, one),
        ("turn_left", PLACEHOLDER, "left", BLANK, -1, FromCell()),
        ("turn_left", BLANK, "fin", BLANK, -1, zero),
        ("left", PLACEHOLDER, "left", PLACEHOLDER, -1, one),
        ("left", BLANK, "turn_right", BLANK, 1, one),
        ("turn_right", PLACEHOLDER, "fin", PLACEHOLDER, 1, zero),
        ("turn_right", BLANK, "fin", BLANK, 1, one),
    ]
    for a in letters:
        rules += [
            ("init", a, "right", BLANK, 1, one),
            ("right", a, "right", a, 1, one),
            ("turn_left", a, "fin", a, -1, zero),
            ("left", a, "left", a, -1, one),
            ("turn_right", a, "right", BLANK, 1, one),
        ]
    states = ("init", "right", "left", "turn_left", "turn_right", "fin")
    return _machine(s, states, letters, "init", rules)


def is_conditional_product_input(word: WeightedWord) -> bool:
    tokens = word.tokens
    m = len(tokens) // 2
    if len(tokens) % 2:
        return False
    return all(isinstance(t, Letter) for t in tokens[:m]) and all(isinstance(t, Weight) for t in tokens[m:])


def conditional_product(word: WeightedWord, semiring: SemiringRef = "nat") -> Value:
    """The closed form of the conditional product machine."""
    s = get_semiring(semiring)
    if not is_conditional_product_input(word):
        return s.zero()
    values = [t.value for t in word.tokens if isinstance(t, Weight)]
    return fold_mul(values, s)


# --- small machines ---

def identity_machine(semiring: SemiringRef = "nat") -> Machine:
    """One transition carrying the weight under the head, then stop."""
    one = ConstWeight(get_semiring(semiring).one())
    rules = [
        ("init", PLACEHOLDER, "fin", PLACEHOLDER, 1, FromCell()),
        ("init", "a", "fin", "a", 1, one),
        ("init", BLANK, "fin", BLANK, 1, one),
    ]
    return _machine(semiring, ("init", "fin"), ("a",), "init", rules)


def limrec_machine(values: Iterable[Value], semiring: SemiringRef = "nat") -> Machine:
    """One limited-recognition step over the given known values."""
    values = frozenset(values)
    rules = [("init", PLACEHOLDER, "fin", PLACEHOLDER, 1, LimRec(values))]
    return _machine(semiring, ("init", "fin"), ("a",), "init", rules, oracle=True, known=values)


def branching_machine(semiring: SemiringRef = "nat") -> Machine:
    """On a value cell either take its weight or overwrite it for a fixed weight two."""
    s = get_semiring(semiring)
    one, two = ConstWeight(s.one()), ConstWeight(s.add(s.one(), s.one()))
    rules = [
        ("init", PLACEHOLDER, "fin", PLACEHOLDER, 1, FromCell()),
        ("init", PLACEHOLDER, "fin", BLANK, 1, two),
        ("init", "a", "fin", "a", 1, one),
        ("init", BLANK, "fin", BLANK, 1, one),
    ]
    return _machine(s, ("init", "fin"), ("a",), "init", rules)


def shuttle_machine(semiring: SemiringRef = "nat") -> Machine:
    """Step right, step back left, stop; the weight of the first cell is taken on the way back."""
    one = ConstWeight(get_semiring(semiring).one())
    rules = []
    for a in ("a", PLACEHOLDER, BLANK):
        rules.append(("go", a, "back", a, 1, one))
        rules.append(("back", a, "pick", a, -1, one))
    rules.append(("pick", PLACEHOLDER, "fin", PLACEHOLDER, 1, FromCell()))
    return _machine(semiring, ("go", "back", "pick", "fin"), ("a",), "go", rules)


def halting_machine(semiring: SemiringRef = "nat") -> Machine:
    """No transitions at all: every input has value one."""
    return _machine(semiring, ("init",), ("a",), "init", [])


def one_step_machine(semiring: SemiringRef = "nat", value: Optional[Value] = None) -> Machine:
    """Over the encoding alphabet: one transition of the given weight (the cell's own on a value), then stop."""
    s = get_semiring(semiring)
    weight = ConstWeight(value if value is not None else s.add(s.one(), s.one()))
    rules = [
        ("init", "0", "fin", "0", 1, weight),
        ("init", "1", "fin", "1", 1, weight),
        ("init", PLACEHOLDER, "fin", PLACEHOLDER, 1, FromCell()),
        ("init", BLANK, "fin", BLANK, 1, weight),
    ]
    return _machine(s, ("init", "fin"), ("0", "1"), "init", rules)


def cell_reader_machine(semiring: SemiringRef = "nat") -> Machine:
    """Over the encoding alphabet: walk right to the first value and take its weight."""
    s = get_semiring(semiring)
    one, zero = ConstWeight(s.one()), ConstWeight(s.zero())
    rules = [
        ("scan", "0", "scan", "0", 1, one),
        ("scan", "1", "scan", "1", 1, one),
        ("scan", PLACEHOLDER, "fin", PLACEHOLDER, -1, FromCell()),
        ("scan", BLANK, "fin", BLANK, -1, zero),
    ]
    return _machine(s, ("scan", "fin"), ("0", "1"), "scan", rules)


def encoding_machines(semiring: SemiringRef = "nat") -> Dict[str, Machine]:
    """Machines that read structure encodings, tape alphabet 0, 1, placeholder, blank."""
    return {
        "one_step": one_step_machine(semiring),
        "cell_reader": cell_reader_machine(semiring),
    }


def small_machines(semiring: SemiringRef = "nat") -> Dict[str, Machine]:
    """Machines with at most four states and no recognition weights."""
    return {
        "id": identity_machine(semiring),
        "branching": branching_machine(semiring),
        "shuttle": shuttle_machine(semiring),
        "halting": halting_machine(semiring),
    }


# --- shipped files ---

def corpus_path(name: str, directory: Optional[str] = None) -> str:
    return os.path.join(directory or Config.CORPUS_DIR, name)


def _read(name: str, directory: Optional[str]) -> str:
    path = corpus_path(name, directory)
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except FileNotFoundError:
        raise FormatError(f"corpus file {path} does not exist")


def load_machine(name: str, semiring: SemiringRef = "nat", directory: Optional[str] = None) -> Machine:
    return parse_machine(_read(f"{name}.srtm", directory), semiring)


def load_machines(semiring: SemiringRef = "nat", directory: Optional[str] = None) -> Dict[str, Machine]:
    folder = directory or Config.CORPUS_DIR
    names = sorted(entry[:-len(".srtm")] for entry in os.listdir(folder) if entry.endswith(".srtm"))
    logger.debug("loading %d corpus machines from %s", len(names), folder)
    return {name: load_machine(name, semiring, folder) for name in names}


def load_signature(name: str, directory: Optional[str] = None) -> Signature:
    return parse_signature(_read(f"{name}.sig", directory))


def load_structure(name: str, semiring: SemiringRef = "nat", directory: Optional[str] = None) -> Tuple[OrderedStructure, Signature]:
    return parse_structure(_read(f"{name}.struct", directory), semiring)


def load_formulas(name: str, sig: Signature, semiring: SemiringRef = "nat", directory: Optional[str] = None) -> List:
    """One formula per line; blank lines and lines starting with % are skipped."""
    out = []
    for line in _read(f"{name}.wfo", directory).splitlines():
        line = line.strip()
        if line and not line.startswith("%"):
            out.append(parse_formula(line, sig, semiring))
    return out
