# srtmkit/services/weso_emitter.py
"""Describing bounded machine computations by weighted existential second-order sentences.

Tape positions and time points are k-tuples of universe elements, read as
base-n numerals with the first component most significant, so a structure of
size n offers n^k of each. The set variables Tape0..Tape3 hold the
(position, time) pairs carrying the symbols 0, 1, the placeholder and the
blank; Head<j> holds (position, time) when the machine is in its j-th state
with the head on that position. The Boolean part admits exactly the
interpretations that trace a computation of n^k - 1 transitions on the
encoding of the structure. A product over time points then collects the
weight of every transition taken.

Positions inside the encoding are computed with tuple additions, which need
set quantifiers. They are only ever used positively so the sentence stays
existential at second order: a position is placed in a region by saying
which region it is in, never by excluding the others.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from srtmkit.errors import AlphabetMismatch, ArityTooSmall, OracleTransitionsPresent, SignatureMismatch
from srtmkit.models import formulas as f
from srtmkit.models.machine import ConstWeight, FromCell, LimRec, Machine, Transition
from srtmkit.models.semiring import get_semiring
from srtmkit.models.structure import OrderedStructure, Signature, encode_structure
from srtmkit.schemas.models import CheckReport, CheckStatus
from srtmkit.services.evaluator import Evaluator
from srtmkit.services.simulator import machine_value, require_valid

logger = logging.getLogger(__name__)

TAPE = "Tape"
HEAD = "Head"
INJECTION = "Inj"

Vars = Tuple[str, ...]
TuplePredicate = Callable[[Vars], object]


@dataclass(frozen=True)
class WesoEmission:
    sentence: object
    psi: Tuple[object, ...]
    chi: object
    time_vars: Vars
    constant_transitions: Tuple[Transition, ...]
    cell_transitions: Tuple[Transition, ...]
    padding: Tuple[Tuple[str, str], ...]


def _check(m: Machine, k: int, sig: Signature) -> Tuple[str, ...]:
    if any(isinstance(t.weight, LimRec) for t in m.transitions):
        raise OracleTransitionsPresent("the sentence covers constant and from-cell weights only")
    require_valid(m)
    arities = [a for _, a in sig.bool_relations + sig.weighted_relations]
    if k < 1 or any(k <= a for a in arities):
        raise ArityTooSmall(f"k = {k} must exceed every relation arity {sorted(set(arities)) or [0]}")
    symbols = ("0", "1", m.placeholder, m.blank)
    extra = sorted(m.tape_alphabet - set(symbols))
    if extra or not m.input_alphabet <= {"0", "1"}:
        raise AlphabetMismatch(
            f"the tape alphabet must be within 0, 1, {m.placeholder}, {m.blank}; found {', '.join(extra) or 'other letters'}"
        )
    for name, _ in sig.bool_relations + sig.weighted_relations:
        if name.startswith((TAPE, HEAD, INJECTION)):
            raise SignatureMismatch(f"relation name '{name}' collides with the sentence's set variables")
    return symbols


class _Emitter:
    def __init__(self, m: Machine, k: int, sig: Signature, symbols: Tuple[str, ...]):
        self.m = m
        self.k = k
        self.sig = sig
        self.symbols = symbols
        self.states = tuple(sorted(m.states))
        self._count = itertools.count()

    # --- names ---

    def fresh(self, hint: str) -> str:
        return f"{hint}{next(self._count)}"

    def tuple_of(self, hint: str, arity: int) -> Vars:
        return tuple(self.fresh(hint) for _ in range(arity))

    def tape(self, symbol: str, p: Vars, t: Vars):
        return f.XAtom(f"{TAPE}{self.symbols.index(symbol)}", p + t)

    def head(self, state: str, p: Vars, t: Vars):
        return f.XAtom(f"{HEAD}{self.states.index(state)}", p + t)

    def head_anywhere(self, p: Vars, t: Vars):
        return f.disj(*[self.head(q, p, t) for q in self.states])

    # --- elements and tuples ---

    def bottom(self, x: str):
        z = self.fresh("z")
        return f.forall(z, f.Leq(x, z))

    def top(self, x: str):
        z = self.fresh("z")
        return f.forall(z, f.Leq(z, x))

    def succ(self, x: str, y: str):
        z = self.fresh("z")
        between = f.conj(f.Not(f.Leq(z, x)), f.Not(f.Leq(y, z)))
        return f.conj(f.Not(f.Leq(y, x)), f.Not(f.ExistsFO(z, between)))

    def all_bottom(self, xs: Vars):
        return f.conj(*[self.bottom(x) for x in xs])

    def all_top(self, xs: Vars):
        return f.conj(*[self.top(x) for x in xs])

    @staticmethod
    def tuple_eq(xs: Vars, ys: Vars):
        return f.conj(*[f.equals(x, y) for x, y in zip(xs, ys)])

    @staticmethod
    def tuple_lt(xs: Vars, ys: Vars):
        options = []
        for i in range(len(xs)):
            prefix = [f.equals(xs[j], ys[j]) for j in range(i)]
            options.append(f.conj(*prefix, f.Not(f.Leq(ys[i], xs[i]))))
        return f.disj(*options)

    def tuple_le(self, xs: Vars, ys: Vars):
        return f.disj(self.tuple_lt(xs, ys), self.tuple_eq(xs, ys))

    def tuple_succ(self, xs: Vars, ys: Vars):
        """ys = xs + 1: the last digits roll over from top to bottom, digit i steps up."""
        options = []
        for i in range(len(xs)):
            same = [f.equals(xs[j], ys[j]) for j in range(i)]
            carry = [f.conj(self.top(xs[j]), self.bottom(ys[j])) for j in range(i + 1, len(xs))]
            options.append(f.conj(*same, self.succ(xs[i], ys[i]), *carry))
        return f.disj(*options)

    def exists_tuple(self, hint: str, arity: int, body: Callable[[Vars], object]):
        xs = self.tuple_of(hint, arity)
        return f.exists_many(xs, body(xs))

    def forall_tuple(self, hint: str, arity: int, body: Callable[[Vars], object]):
        xs = self.tuple_of(hint, arity)
        return f.forall_many(xs, body(xs))

    # --- counting with set variables ---

    def inject(self, dom_arity: int, dom: TuplePredicate, cod_arity: int, cod: TuplePredicate):
        """Some relation maps every tuple in dom to its own tuple in cod."""
        rel = self.fresh(INJECTION)
        d, d2 = self.tuple_of("d", dom_arity), self.tuple_of("d", dom_arity)
        c = self.tuple_of("c", cod_arity)
        total = f.forall_many(d, f.implies(dom(d), f.exists_many(c, f.conj(cod(c), f.XAtom(rel, d + c)))))
        one_one = f.forall_many(
            d + d2 + c,
            f.implies(f.conj(f.XAtom(rel, d + c), f.XAtom(rel, d2 + c)), self.tuple_eq(d, d2)),
        )
        return f.ExistsSO(rel, dom_arity + cod_arity, f.conj(total, one_one))

    def sum_is(self, q: Vars, p: Vars, x: Vars):
        """q = p + x: the interval [p, q) has as many positions as there are tuples up to x."""
        span = lambda d: f.conj(self.tuple_le(p, d), self.tuple_lt(d, q))
        upto = lambda c: self.tuple_le(c, x)
        return f.conj(
            self.inject(self.k, span, len(x), upto),
            self.inject(len(x), upto, self.k, span),
        )

    def overflows(self, p: Vars, x: Vars):
        """p + x runs past the last position."""
        rest = lambda d: self.tuple_le(p, d)
        return self.inject(self.k, rest, len(x), lambda c: self.tuple_le(c, x))

    # --- offsets into the encoding ---

    def at_offset(self, o: Vars, terms: Sequence[int]):
        """o is the sum of n^r over the arities r in `terms`."""
        if not terms:
            return self.all_bottom(o)
        return self.exists_tuple("o", self.k, lambda prev: f.conj(
            self.at_offset(prev, terms[:-1]),
            self.exists_tuple("z", terms[-1], lambda z: f.conj(self.all_top(z), self.sum_is(o, prev, z))),
        ))

    def past_end(self, terms: Sequence[int]):
        options = []
        for i in range(len(terms)):
            options.append(self.exists_tuple("o", self.k, lambda prev, i=i: f.conj(
                self.at_offset(prev, terms[:i]),
                self.exists_tuple("z", terms[i], lambda z: f.conj(self.all_top(z), self.overflows(prev, z))),
            )))
        return f.disj(*options)

    def before(self, p: Vars, terms: Sequence[int]):
        return f.disj(
            self.exists_tuple("o", self.k, lambda o: f.conj(self.at_offset(o, terms), self.tuple_lt(p, o))),
            self.past_end(terms),
        )

    def after(self, p: Vars, terms: Sequence[int]):
        return self.exists_tuple("o", self.k, lambda o: f.conj(self.at_offset(o, terms), self.tuple_lt(o, p)))

    def cell_of(self, p: Vars, terms: Sequence[int], x: Vars):
        """p holds the entry for x of the block that starts right after offset `terms`."""
        return self.exists_tuple("o", self.k, lambda o: f.conj(self.at_offset(o, terms), self.sum_is(p, o, x)))

    def layout(self):
        """Offsets of the blocks: Boolean relations, weighted relations, and the end of the encoding."""
        terms = [1]
        bool_blocks, weighted_blocks = [], []
        for name, arity in self.sig.bool_relations:
            bool_blocks.append((name, arity, tuple(terms)))
            terms.append(arity)
        values_from = tuple(terms)
        for name, arity in self.sig.weighted_relations:
            weighted_blocks.append((name, arity, tuple(terms)))
            terms.append(arity)
        return bool_blocks, values_from, weighted_blocks, tuple(terms)

    # --- the Boolean part ---

    def one_symbol(self):
        def cell(p, t):
            return f.disj(*[
                f.conj(self.tape(a, p, t), *[f.Not(self.tape(b, p, t)) for b in self.symbols if b != a])
                for a in self.symbols
            ])
        return self.forall_tuple("p", self.k, lambda p: self.forall_tuple("t", self.k, lambda t: cell(p, t)))

    def one_head(self):
        def unique(t):
            return self.exists_tuple("p", self.k, lambda p: f.conj(
                self.head_anywhere(p, t),
                self.forall_tuple("p", self.k, lambda p2: f.implies(self.head_anywhere(p2, t), self.tuple_eq(p2, p))),
            ))
        conjuncts = [self.forall_tuple("t", self.k, unique)]
        if len(self.states) > 1:
            def exclusive(p, t):
                return f.conj(*[
                    f.disj(f.Not(self.head(a, p, t)), f.Not(self.head(b, p, t)))
                    for a, b in itertools.combinations(self.states, 2)
                ])
            conjuncts.append(
                self.forall_tuple("p", self.k, lambda p: self.forall_tuple("t", self.k, lambda t: exclusive(p, t)))
            )
        return f.conj(*conjuncts)

    def moved(self, p: Vars, q: Vars, direction: int):
        if direction > 0:
            return self.tuple_succ(p, q)
        if direction < 0:
            # |0 - 1| = 1
            return f.disj(self.tuple_succ(q, p), f.conj(self.all_bottom(p), self.tuple_succ(p, q)))
        return self.tuple_eq(p, q)

    def theta(self, t: Vars, state: str, read: str, target: str, write: str, direction: int):
        """Time t to t + 1 follows the given move."""
        p, q, s = self.tuple_of("p", self.k), self.tuple_of("q", self.k), self.tuple_of("s", self.k)
        frame = self.forall_tuple("p", self.k, lambda other: f.disj(
            self.tuple_eq(other, p),
            f.conj(*[f.iff(self.tape(a, other, t), self.tape(a, other, s)) for a in self.symbols]),
        ))
        body = f.conj(
            self.tuple_succ(t, s),
            self.moved(p, q, direction),
            self.head(state, p, t),
            self.tape(read, p, t),
            self.head(target, q, s),
            self.tape(write, p, s),
            frame,
        )
        return f.exists_many(p + q + s, body)

    def padding(self) -> List[Tuple[str, str]]:
        return [(q, a) for q in self.states for a in self.symbols if (q, a) not in self.m.index]

    def moves(self, t: Vars) -> List[Tuple[object, Optional[Transition]]]:
        out = []
        for tr in sorted(self.m.transitions, key=Transition.serialize):
            out.append((self.theta(t, tr.from_state, tr.read, tr.to_state, tr.write, tr.direction), tr))
        for q, a in self.padding():
            out.append((self.theta(t, q, a, q, a, 0), None))
        return out

    def respects_transitions(self):
        return self.forall_tuple("t", self.k, lambda t: f.disj(self.all_top(t), *[th for th, _ in self.moves(t)]))

    def initial(self):
        bool_blocks, values_from, weighted_blocks, end = self.layout()
        origin = self.exists_tuple("p", self.k, lambda p: f.conj(
            self.all_bottom(p), self.head(self.m.initial_state, p, p)
        ))

        def content(p, t):
            options = [
                f.conj(self.before(p, [1]), self.tape("0", p, t)),
                f.conj(self.at_offset(p, [1]), self.tape("1", p, t)),
            ]
            for name, arity, terms in bool_blocks:
                options.append(self.exists_tuple("x", arity, lambda x, name=name, terms=terms: f.conj(
                    self.cell_of(p, terms, x),
                    f.disj(
                        f.conj(f.RAtom(name, x), self.tape("1", p, t)),
                        f.conj(f.Not(f.RAtom(name, x)), self.tape("0", p, t)),
                    ),
                )))
            if weighted_blocks:
                options.append(f.conj(
                    self.after(p, values_from),
                    f.disj(
                        self.exists_tuple("o", self.k, lambda o: f.conj(self.at_offset(o, end), self.tuple_le(p, o))),
                        self.past_end(end),
                    ),
                    self.tape(self.m.placeholder, p, t),
                ))
            options.append(f.conj(self.after(p, end), self.tape(self.m.blank, p, t)))
            return f.disj(*options)

        tape = self.forall_tuple("p", self.k, lambda p: self.exists_tuple("t", self.k, lambda t: f.conj(
            self.all_bottom(t), content(p, t)
        )))
        return f.conj(origin, tape)

    # --- the weighted part ---

    def cell_weight(self, t: Vars):
        """The annotation of the cell under the head at time t."""
        _, _, weighted_blocks, _ = self.layout()
        if not weighted_blocks:
            return f.Const(get_semiring(self.m.semiring).zero())
        p = self.tuple_of("p", self.k)
        lookups = []
        for name, arity, terms in weighted_blocks:
            x = self.tuple_of("x", arity)
            lookups.append(_sum_many(x, f.Times((f.WAtom(name, x), self.cell_of(p, terms, x)))))
        return _sum_many(p, f.Times((self.head_anywhere(p, t), f.plus(*lookups))))

    def chi(self, t: Vars):
        one = get_semiring(self.m.semiring).one()
        constant, from_cell, terms = [], [], [self.all_top(t)]
        for th, tr in self.moves(t):
            if tr is None:
                terms.append(f.Times((f.Const(one), th)))
            elif isinstance(tr.weight, ConstWeight):
                constant.append(tr)
                terms.append(f.Times((f.Const(tr.weight.value), th)))
            elif isinstance(tr.weight, FromCell):
                from_cell.append(tr)
                terms.append(f.Times((self.cell_weight(t), th)))
        return f.plus(*terms), tuple(constant), tuple(from_cell)

    def emit(self) -> WesoEmission:
        psi = (self.one_symbol(), self.one_head(), self.respects_transitions(), self.initial())
        t = self.tuple_of("t", self.k)
        chi, constant, from_cell = self.chi(t)
        product = chi
        for var in reversed(t):
            product = f.ProdFO(var, product)
        sentence = f.Times(psi + (product,))
        arity = 2 * self.k
        for name in reversed(self.predicates()):
            sentence = f.SumSO(name, arity, sentence)
        return WesoEmission(
            sentence=sentence,
            psi=psi,
            chi=chi,
            time_vars=t,
            constant_transitions=constant,
            cell_transitions=from_cell,
            padding=tuple(self.padding()),
        )

    def predicates(self) -> List[str]:
        return [f"{TAPE}{i}" for i in range(len(self.symbols))] + [f"{HEAD}{j}" for j in range(len(self.states))]


def _sum_many(variables: Vars, body):
    for v in reversed(variables):
        body = f.SumFO(v, body)
    return body


def emit_weso(m: Machine, k: int, sig: Signature) -> WesoEmission:
    symbols = _check(m, k, sig)
    emission = _Emitter(m, k, sig, symbols).emit()
    logger.debug(
        "emitted sentence with %d nodes: %d constant, %d from-cell and %d padding moves",
        f.size(emission.sentence), len(emission.constant_transitions),
        len(emission.cell_transitions), len(emission.padding),
    )
    return emission


def machine_to_weso(m: Machine, k: int, sig: Signature):
    return emit_weso(m, k, sig).sentence


def crosscheck_weso(m: Machine, k: int, structure: OrderedStructure, sig: Signature) -> CheckReport:
    """Evaluate the emitted sentence on the structure and run the machine on its encoding."""
    sentence = machine_to_weso(m, k, sig)
    steps = structure.size ** k - 1
    simulated = machine_value(m, encode_structure(structure, sig), steps)
    evaluator = Evaluator(structure, m.semiring)
    direct = evaluator.eval_weighted(sentence)
    passed = direct == simulated
    logger.info("weso crosscheck at n=%d, k=%d: formula %s, machine %s", structure.size, k, direct, simulated)
    return CheckReport(
        name="weso",
        status=CheckStatus.PASS if passed else CheckStatus.FAIL,
        left_label="formula",
        left_value=str(direct),
        right_label="machine",
        right_value=str(simulated),
        budget=steps,
        message="" if passed else "emitted sentence and simulator disagree",
    )
