# srtmkit/services/cook_levin.py
"""Encoding bounded machine computations as weighted QBFs.

Variables T_i_j_k (cell i holds symbol j at time k), H_i_k (head on cell i)
and Q_q_k (state q) are summed out over a product of constraints. Every
interpretation that is not a computation path is annihilated by some
constraint; a path interpretation picks up the weights of its transitions.
Transition weights stay symbolic: `surr@i` for the value in input cell i,
`surr:r<j>` for the j-th known value.
"""
import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from srtmkit.errors import BoundTooSmall, BudgetExceeded, FormatError, OracleTransitionsPresent
from srtmkit.models import wqbf as q
from srtmkit.models.machine import ConstWeight, FromCell, Letter, LimRec, Machine, Weight, WeightedWord
from srtmkit.models.semiring import Value, get_semiring, literal
from srtmkit.schemas.models import CheckReport, CheckStatus
from srtmkit.services.simulator import machine_value, require_valid
from srtmkit.services.wqbf_solver import EvalStats, eval_wqbf_pruned, substitute_surrogates

logger = logging.getLogger(__name__)

SUBFORMULAS = tuple(range(1, 13))


@dataclass(frozen=True)
class TimeSpaceBound:
    """p(n) = c0 + c1*n + c2*n^2 + ... bounding the number of transitions."""
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs or any(c < 0 for c in self.coeffs) or self.coeffs[0] < 1:
            raise FormatError(
                f"bound {self.coeffs} needs natural coefficients and a constant term of at least 1"
            )

    @classmethod
    def parse(cls, text: str) -> "TimeSpaceBound":
        try:
            coeffs = tuple(int(c) for c in str(text).split(",") if c.strip())
        except ValueError:
            raise FormatError(f"bound '{text}' must be comma-separated naturals, lowest degree first")
        return cls(coeffs)

    def at(self, n: int) -> int:
        return sum(c * n ** i for i, c in enumerate(self.coeffs))

    def last_cell(self, n: int) -> int:
        return max(self.at(n), n - 1)

    def cells(self, n: int) -> range:
        return range(self.last_cell(n) + 1)

    def steps(self, n: int) -> range:
        return range(self.at(n) + 1)


@dataclass
class VarAtlas:
    symbols: Tuple[str, ...]
    states: Tuple[str, ...]
    cells: int
    steps: int
    tape: Dict[Tuple[int, str, int], str] = field(default_factory=dict)
    head: Dict[Tuple[int, int], str] = field(default_factory=dict)
    state: Dict[Tuple[str, int], str] = field(default_factory=dict)
    named_values: Dict[str, Value] = field(default_factory=dict)
    positions: List[int] = field(default_factory=list)

    @classmethod
    def build(cls, m: Machine, cells: int, steps: int) -> "VarAtlas":
        atlas = cls(tuple(sorted(m.tape_alphabet)), tuple(sorted(m.states)), cells, steps)
        for k in range(steps):
            for i in range(cells):
                for j, sym in enumerate(atlas.symbols):
                    atlas.tape[(i, sym, k)] = f"T_{i}_{j}_{k}"
        for k in range(steps):
            for i in range(cells):
                atlas.head[(i, k)] = f"H_{i}_{k}"
        for k in range(steps):
            for j, st in enumerate(atlas.states):
                atlas.state[(st, k)] = f"Q_{j}_{k}"
        for j, value in enumerate(sorted(m.known_values, key=literal)):
            atlas.named_values[f"r{j}"] = value
        return atlas

    def variables(self) -> List[str]:
        return list(self.tape.values()) + list(self.head.values()) + list(self.state.values())

    def constant_name(self, value: Value) -> str:
        for name, v in self.named_values.items():
            if v == value:
                return name
        raise KeyError(literal(value))

    def expected_count(self) -> int:
        return self.cells * len(self.symbols) * self.steps + self.cells * self.steps + len(self.states) * self.steps


# --- literal helpers ---

def _pos(name: str):
    return q.PosLit(name)


def _neg(name: str):
    return q.NegLit(name)


def _guarded(guards: List[str], tail) -> object:
    """!g1 + g1*!g2 + g1*g2*!g3 + ... + g1*...*gm*tail; a missing tail contributes zero."""
    terms = []
    for idx, g in enumerate(guards):
        terms.append(q.times(*[_pos(h) for h in guards[:idx]], _neg(g)))
    if tail is not None:
        terms.append(q.times(*[_pos(h) for h in guards], tail))
    return q.plus(*terms)


def _skeleton(m: Machine, n: int, shape: Optional[WeightedWord]) -> List[str]:
    if shape is None:
        return [m.placeholder] * n
    if len(shape) != n:
        raise FormatError(f"input shape has length {len(shape)}, expected {n}")
    return [t.symbol if isinstance(t, Letter) else m.placeholder for t in shape.tokens]


def _probe(m: Machine, n: int, p: int, shape: Optional[WeightedWord]) -> None:
    one = get_semiring(m.semiring).one()
    if shape is None:
        word = WeightedWord(tuple(Weight(one) for _ in range(n)))
    else:
        word = WeightedWord(tuple(t if isinstance(t, Letter) else Weight(one) for t in shape.tokens))
    try:
        machine_value(m, word, p)
    except BudgetExceeded as e:
        raise BoundTooSmall(f"a computation on inputs of length {n} runs longer than p(n) = {p} steps") from e


# --- encoder ---

def machine_to_wqbf(
    m: Machine,
    n: int,
    p: TimeSpaceBound,
    shape: Optional[WeightedWord] = None,
    omit: Iterable[int] = (),
) -> Tuple[object, VarAtlas]:
    if any(isinstance(t.weight, LimRec) for t in m.transitions):
        raise OracleTransitionsPresent("the encoding covers constant and from-cell weights only")
    require_valid(m)
    omit: FrozenSet[int] = frozenset(11 if o == 10 else o for o in omit)
    if not omit <= set(SUBFORMULAS):
        raise FormatError(f"subformulas are numbered 1..12, cannot omit {sorted(omit - set(SUBFORMULAS))}")
    bound = p.at(n)
    _probe(m, n, bound, shape)

    cells = list(p.cells(n))
    last = cells[-1]
    steps = list(p.steps(n))
    atlas = VarAtlas.build(m, len(cells), len(steps))
    T, H, Q = atlas.tape, atlas.head, atlas.state
    sigma, states = atlas.symbols, atlas.states
    initial_tape = _skeleton(m, n, shape)
    factors = []

    def emit(number: int, node) -> None:
        if number not in omit:
            factors.append(node)

    # 1-4: initial configuration
    for i, sym in enumerate(initial_tape):
        emit(1, _pos(T[(i, sym, 0)]))
    for i in cells[n:]:
        emit(2, _pos(T[(i, m.blank, 0)]))
    emit(3, _pos(Q[(m.initial_state, 0)]))
    emit(4, _pos(H[(0, 0)]))

    for k in steps:
        for i in cells:
            # 5: at most one symbol per cell
            for j, j2 in permutations(sigma, 2):
                emit(5, _guarded([T[(i, j, k)]], _neg(T[(i, j2, k)])))
            # 6: at least one
            emit(6, q.plus(*[_pos(T[(i, j, k)]) for j in sigma]))
        # 8: one state, 9: one head position
        for a, b in permutations(states, 2):
            emit(8, _guarded([Q[(a, k)]], _neg(Q[(b, k)])))
        for a, b in permutations(cells, 2):
            emit(9, _guarded([H[(a, k)]], _neg(H[(b, k)])))

    for k in steps[:-1]:
        for i in cells:
            # 7: cells away from the head keep their symbol
            for j, j2 in permutations(sigma, 2):
                emit(7, q.plus(
                    _neg(T[(i, j, k)]),
                    q.times(_pos(T[(i, j, k)]), _neg(T[(i, j2, k + 1)])),
                    q.times(_pos(T[(i, j, k)]), _pos(T[(i, j2, k + 1)]), _pos(H[(i, k)])),
                ))
            for state in states:
                for sym in sigma:
                    guards = [H[(i, k)], Q[(state, k)], T[(i, sym, k)]]
                    outgoing = m.index.get((state, sym), ())
                    if not outgoing:
                        # 12: halted configurations stay put
                        emit(12, _guarded(guards, q.times(
                            _pos(H[(i, k + 1)]), _pos(Q[(state, k + 1)]), _pos(T[(i, sym, k + 1)])
                        )))
                        continue
                    # 10 and 11: one of the outgoing transitions is taken
                    moves = []
                    for t in outgoing:
                        target = abs(i + t.direction)
                        if target > last:
                            continue
                        moves.append(q.times(
                            _pos(H[(target, k + 1)]),
                            _pos(Q[(t.to_state, k + 1)]),
                            _pos(T[(i, t.write, k + 1)]),
                            _surrogate(atlas, t.weight, i),
                        ))
                    emit(11, _guarded(guards, q.plus(*moves) if moves else None))

    alpha = q.sum_all(atlas.variables(), q.Times(tuple(factors)) if len(factors) != 1 else factors[0])
    logger.debug(
        "encoded %d steps over %d cells: %d variables, %d factors",
        len(steps), len(cells), len(atlas.variables()), len(factors),
    )
    return alpha, atlas


def _surrogate(atlas: VarAtlas, weight, cell: int):
    if isinstance(weight, FromCell):
        if cell not in atlas.positions:
            atlas.positions.append(cell)
        return q.Surrogate(q.InputPosition(cell))
    if isinstance(weight, ConstWeight):
        return q.Surrogate(q.NamedConst(atlas.constant_name(weight.value)))
    raise OracleTransitionsPresent(f"cannot encode weight {weight.serialize()}")


def crosscheck_wqbf(
    m: Machine,
    x: WeightedWord,
    p: TimeSpaceBound,
    omit: Iterable[int] = (),
    stats: Optional[EvalStats] = None,
) -> CheckReport:
    n = len(x)
    alpha, atlas = machine_to_wqbf(m, n, p, shape=x, omit=omit)
    closed = substitute_surrogates(alpha, x, atlas.named_values, m.semiring)
    encoded = eval_wqbf_pruned(closed, m.semiring, stats)
    simulated = machine_value(m, x, p.at(n))
    passed = encoded == simulated
    logger.info("crosscheck on '%s': formula %s, machine %s", x.render(), encoded, simulated)
    return CheckReport(
        name="wqbf",
        status=CheckStatus.PASS if passed else CheckStatus.FAIL,
        left_label="formula",
        left_value=str(encoded),
        right_label="machine",
        right_value=str(simulated),
        budget=p.at(n),
        message="" if passed else "encoded formula and simulator disagree",
    )
