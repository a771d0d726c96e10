# srtmkit/services/samples.py
"""Seeded random machines, words, structures and weighted QBFs for property checks."""
import random
from typing import FrozenSet, List, Optional

from srtmkit.models import wqbf as q
from srtmkit.models.machine import ConstWeight, FromCell, Letter, Machine, Transition, Weight, WeightedWord
from srtmkit.models.semiring import SemiringRef, get_semiring
from srtmkit.models.structure import OrderedStructure, Signature, enumerate_tuples_lex
from srtmkit.services.corpus import is_conditional_product_input

SINK = "sink"
LETTERS = ("a",)


def random_layered_machine(rng: random.Random, semiring: SemiringRef, states: int = 4) -> Machine:
    """Transitions only lead to later states or the sink, so every run halts within `states` steps.

    Every state but the sink has a move on every symbol, so every run ends in the
    sink, which has no transitions.
    """
    s = get_semiring(semiring)
    names = [f"q{i}" for i in range(states)] + [SINK]
    symbols = LETTERS + ("X", "_")
    known = {s.one(), s.zero()}
    transitions = set()
    for i, state in enumerate(names[:-1]):
        for symbol in symbols:
            for _ in range(rng.randint(1, 2)):
                target = rng.choice(names[i + 1:])
                if rng.random() < 0.3:
                    weight = FromCell()
                else:
                    value = s.sample(rng)
                    known.add(value)
                    weight = ConstWeight(value)
                transitions.add(Transition(state, symbol, target, rng.choice(symbols), rng.choice((-1, 1)), weight))
    return Machine(
        semiring=s.name,
        known_values=frozenset(known),
        states=frozenset(names),
        input_alphabet=frozenset(LETTERS),
        tape_alphabet=frozenset(symbols),
        initial_state=names[0],
        blank="_",
        placeholder="X",
        transitions=frozenset(transitions),
    )


def random_word(rng: random.Random, semiring: SemiringRef, length: int, letters=LETTERS) -> WeightedWord:
    s = get_semiring(semiring)
    tokens = []
    for _ in range(length):
        if rng.random() < 0.5:
            tokens.append(Letter(rng.choice(letters)))
        else:
            tokens.append(Weight(s.sample(rng)))
    return WeightedWord(tuple(tokens))


def well_formed_product_input(rng: random.Random, semiring: SemiringRef, max_length: int = 5) -> WeightedWord:
    s = get_semiring(semiring)
    m = rng.randint(0, max_length // 2)
    return WeightedWord(tuple([Letter("a")] * m + [Weight(s.sample(rng)) for _ in range(m)]))


def malformed_product_input(rng: random.Random, semiring: SemiringRef, max_length: int = 5) -> WeightedWord:
    """A word that is not m letters followed by m values."""
    while True:
        word = random_word(rng, semiring, rng.randint(1, max_length))
        if not is_conditional_product_input(word):
            return word


def random_structure(
    rng: random.Random, size: int, sig: Signature, semiring: SemiringRef, density: float = 0.5
) -> OrderedStructure:
    s = get_semiring(semiring)
    bools = {
        name: frozenset(t for t in enumerate_tuples_lex(size, k) if rng.random() < density)
        for name, k in sig.bool_relations
    }
    weighted = {
        name: {t: s.sample(rng) for t in enumerate_tuples_lex(size, k)}
        for name, k in sig.weighted_relations
    }
    return OrderedStructure(size=size, semiring=s.name, bool_rels=bools, weighted_rels=weighted)


def random_wqbf(
    rng: random.Random,
    semiring: SemiringRef,
    variables: int,
    max_products: int = 3,
    depth: int = 3,
    constants: Optional[List] = None,
):
    """A closed formula: a random prefix over x0.. followed by a random body.

    Product quantifiers square their body's value, so at most `max_products`
    of them appear in the prefix.
    """
    s = get_semiring(semiring)
    names = [f"x{i}" for i in range(variables)]
    pool = constants if constants is not None else [s.zero(), s.one(), s.add(s.one(), s.one())]

    def body(level: int):
        if level == 0 or rng.random() < 0.25:
            roll = rng.random()
            if roll < 0.2:
                return q.Const(rng.choice(pool))
            var = rng.choice(names)
            return q.PosLit(var) if roll < 0.6 else q.NegLit(var)
        parts = tuple(body(level - 1) for _ in range(rng.randint(2, 3)))
        return q.Plus(parts) if rng.random() < 0.5 else q.Times(parts)

    node = body(depth)
    products = 0
    for var in reversed(names):
        if products < max_products and rng.random() < 0.3:
            products += 1
            node = q.ProdVar(var, node)
        else:
            node = q.SumVar(var, node)
    return node


def random_nested_wqbf(
    rng: random.Random,
    semiring: SemiringRef,
    variables: int,
    max_products: int = 3,
    depth: int = 6,
    constants: Optional[List] = None,
):
    """A closed formula with quantifiers anywhere under + and *.

    At most `variables` quantifiers occur. Their names come from x0.. and an
    inner quantifier may rebind a name already in scope; literals only mention
    names bound above them.
    """
    s = get_semiring(semiring)
    names = [f"x{i}" for i in range(variables)]
    pool = constants if constants is not None else [s.zero(), s.one(), s.add(s.one(), s.one())]
    budget = variables
    products = 0

    def leaf(scope: FrozenSet[str]):
        if not scope or rng.random() < 0.2:
            return q.Const(rng.choice(pool))
        var = rng.choice(sorted(scope))
        return q.PosLit(var) if rng.random() < 0.5 else q.NegLit(var)

    def quantify(scope: FrozenSet[str], level: int):
        nonlocal budget, products
        budget -= 1
        var = rng.choice(names)
        kind = q.SumVar
        if products < max_products and rng.random() < 0.3:
            products += 1
            kind = q.ProdVar
        return kind(var, node(scope | {var}, level - 1))

    def node(scope: FrozenSet[str], level: int):
        if level <= 0 or rng.random() < 0.2:
            return leaf(scope)
        if budget and rng.random() < 0.35:
            return quantify(scope, level)
        parts = tuple(node(scope, level - 1) for _ in range(rng.randint(2, 3)))
        return q.Plus(parts) if rng.random() < 0.5 else q.Times(parts)

    return quantify(frozenset(), max(depth, 1))
