# srtmkit/services/wqbf_solver.py
"""Evaluation of weighted QBFs: the literal semantics and a pruned search."""
import logging
import sys
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from srtmkit.errors import MixedSemirings, UnknownNamedSurrogate, UnresolvedSurrogate
from srtmkit.models import wqbf as q
from srtmkit.models.machine import WeightedWord
from srtmkit.models.semiring import Semiring, SemiringRef, Value, get_semiring
from srtmkit.parsers.formula_parser import RECURSION_LIMIT

logger = logging.getLogger(__name__)

# a pending factor and its free variables
Factor = Tuple[object, FrozenSet[str]]


@dataclass
class EvalStats:
    """Interpretations visited: complete assignments reached in innermost quantifier blocks."""
    interpretations: int = 0


# --- surrogates ---

def substitute_surrogates(alpha, word: WeightedWord, named: Mapping[str, Value], semiring: SemiringRef):
    """Replace surr@i by the value at input position i (zero when that is a letter) and surr:name by named[name]."""
    zero = get_semiring(semiring).zero()
    cache: Dict[int, object] = {}

    def go(node):
        hit = cache.get(id(node))
        if hit is not None:
            return hit
        if isinstance(node, q.Surrogate):
            tag = node.tag
            if isinstance(tag, q.InputPosition):
                value = word.value_at(tag.index)
                out = q.Const(zero if value is None else value)
            else:
                if tag.name not in named:
                    raise UnknownNamedSurrogate(f"no value supplied for surrogate '{tag.name}'")
                out = q.Const(named[tag.name])
        elif isinstance(node, q.Plus):
            out = q.Plus(tuple(go(p) for p in node.parts))
        elif isinstance(node, q.Times):
            out = q.Times(tuple(go(p) for p in node.parts))
        elif isinstance(node, q.SumVar):
            out = q.SumVar(node.var, go(node.body))
        elif isinstance(node, q.ProdVar):
            out = q.ProdVar(node.var, go(node.body))
        else:
            out = node
        cache[id(node)] = out
        return out

    return go(alpha)


# --- literal semantics ---

def eval_wqbf_naive(
    alpha,
    interp: Optional[q.LiteralInterp] = None,
    semiring: SemiringRef = None,
    stats: Optional[EvalStats] = None,
) -> Value:
    """The defining clauses, one interpretation at a time."""
    s = _semiring_of(alpha, semiring)
    stats = stats if stats is not None else EvalStats()

    def go(node, interp: q.LiteralInterp) -> Value:
        if isinstance(node, q.Const):
            s._own(node.value)
            return node.value
        if isinstance(node, q.PosLit):
            return s.one() if interp.holds(node.var, True) else s.zero()
        if isinstance(node, q.NegLit):
            return s.one() if interp.holds(node.var, False) else s.zero()
        if isinstance(node, q.Surrogate):
            raise UnresolvedSurrogate(f"{q.render_wqbf(node)} must be substituted before evaluation")
        if isinstance(node, q.Plus):
            acc = s.zero()
            for p in node.parts:
                acc = s.add(acc, go(p, interp))
            return acc
        if isinstance(node, q.Times):
            acc = s.one()
            for p in node.parts:
                acc = s.mul(acc, go(p, interp))
            return acc
        if isinstance(node, (q.SumVar, q.ProdVar)):
            if not _has_quantifier(node.body):
                stats.interpretations += 2
            positive = go(node.body, interp.with_pos(node.var))
            negative = go(node.body, interp.with_neg(node.var))
            return s.add(positive, negative) if isinstance(node, q.SumVar) else s.mul(positive, negative)
        raise TypeError(f"not a weighted QBF node: {node!r}")

    return go(alpha, interp or q.LiteralInterp())


def _has_quantifier(node) -> bool:
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, (q.SumVar, q.ProdVar)):
            return True
        stack.extend(q.children(n))
    return False


def _semiring_of(alpha, semiring: SemiringRef) -> Semiring:
    if semiring is not None:
        return get_semiring(semiring)
    stack = [alpha]
    while stack:
        node = stack.pop()
        if isinstance(node, q.Const):
            return get_semiring(node.value.semiring)
        stack.extend(q.children(node))
    raise MixedSemirings("formula has no constants; name its semiring explicitly")


# --- pruned search ---

class PrunedEvaluator:
    """Evaluates quantifier blocks by branching only on variables that still matter.

    Inside a block the body is kept as a list of pending factors. Fixing a
    variable simplifies only the factors that mention it; a factor that becomes
    zero annihilates the branch, and variables no factor mentions any more are
    accounted for in closed form (doubling under a sum, squaring under a
    product) instead of being branched on.
    """

    def __init__(self, semiring: Semiring, stats: Optional[EvalStats] = None):
        self.s = semiring
        self.zero = semiring.zero()
        self.one = semiring.one()
        self.stats = stats if stats is not None else EvalStats()
        self._fv: Dict[int, FrozenSet[str]] = {}
        self._keep: List[object] = []

    def free(self, node) -> FrozenSet[str]:
        key = id(node)
        hit = self._fv.get(key)
        if hit is None:
            if isinstance(node, (q.PosLit, q.NegLit)):
                hit = frozenset((node.var,))
            elif isinstance(node, (q.Const, q.Surrogate)):
                hit = frozenset()
            else:
                hit = frozenset()
                for child in q.children(node):
                    hit |= self.free(child)
                if isinstance(node, (q.SumVar, q.ProdVar)):
                    hit -= {node.var}
            self._fv[key] = hit
            self._keep.append(node)
        return hit

    def evaluate(self, node, assign: Optional[Dict[str, bool]] = None) -> Value:
        """Value of a node all of whose free variables are fixed (or read as false both ways)."""
        self._keep.append(node)
        out = self.simplify(node, dict(assign or {}), frozenset())
        if not isinstance(out, q.Const):
            raise TypeError("closed formula did not reduce to a constant")
        return out.value

    def simplify(self, node, assign: Dict[str, bool], pending: FrozenSet[str]):
        """Partially evaluate; variables in `pending` are still undecided."""
        s = self.s
        if isinstance(node, q.Const):
            s._own(node.value)
            return node
        if isinstance(node, (q.PosLit, q.NegLit)):
            if node.var in assign:
                hit = assign[node.var] == isinstance(node, q.PosLit)
                return q.Const(self.one if hit else self.zero)
            if node.var in pending:
                return node
            return q.Const(self.zero)
        if isinstance(node, q.Surrogate):
            raise UnresolvedSurrogate(f"{q.render_wqbf(node)} must be substituted before evaluation")
        if isinstance(node, q.Times):
            acc = self.one
            rest = []
            for p in node.parts:
                r = self.simplify(p, assign, pending)
                if isinstance(r, q.Const):
                    acc = s.mul(acc, r.value)
                    if acc == self.zero:
                        return q.Const(self.zero)
                elif isinstance(r, q.Times):
                    rest.extend(r.parts)
                else:
                    rest.append(r)
            if not rest:
                return q.Const(acc)
            if acc != self.one:
                rest.insert(0, q.Const(acc))
            return q.times(*rest)
        if isinstance(node, q.Plus):
            acc = self.zero
            rest = []
            for p in node.parts:
                r = self.simplify(p, assign, pending)
                if isinstance(r, q.Const):
                    acc = s.add(acc, r.value)
                else:
                    rest.append(r)
            if not rest:
                return q.Const(acc)
            if acc != self.zero:
                rest.insert(0, q.Const(acc))
            return q.plus(*rest)
        if isinstance(node, (q.SumVar, q.ProdVar)):
            if not (self.free(node) & pending):
                return q.Const(self._block(node, assign))
            inner_assign = {k: v for k, v in assign.items() if k != node.var}
            body = self.simplify(node.body, inner_assign, pending | {node.var})
            rebuilt = type(node)(node.var, body)
            if not (self.free(rebuilt) & pending):
                return q.Const(self._block(rebuilt, {}))
            return rebuilt
        raise TypeError(f"not a weighted QBF node: {node!r}")

    def _block(self, node, assign: Dict[str, bool]) -> Value:
        kind = type(node)
        chain: List[str] = []
        body = node
        while type(body) is kind:
            chain.append(body.var)
            body = body.body
        block = frozenset(chain)
        unused_repeats = len(chain) - len(block)
        local = {k: v for k, v in assign.items() if k not in block}
        start = self.simplify(body, local, block)
        factors = self._factors(start)
        counted = not _has_quantifier(body)
        if factors is None:
            self._visit(counted)
            return self._close(kind, self.zero, len(block) + unused_repeats)
        acc, pending = factors
        return self._branch(kind, acc, pending, block, unused_repeats, counted)

    def _factors(self, node) -> Optional[Tuple[Value, List[Factor]]]:
        if isinstance(node, q.Const):
            if node.value == self.zero:
                return None
            return node.value, []
        parts = node.parts if isinstance(node, q.Times) else (node,)
        acc, rest = self.one, []
        for p in parts:
            if isinstance(p, q.Const):
                acc = self.s.mul(acc, p.value)
            else:
                rest.append((p, q.free_vars(p)))
        if acc == self.zero:
            return None
        return acc, rest

    def _close(self, kind, value: Value, unused: int) -> Value:
        """Account for variables that no longer occur."""
        s = self.s
        for _ in range(unused):
            if kind is q.SumVar:
                if s.plus_idempotent:
                    break
                value = s.add(value, value)
            else:
                value = s.mul(value, value)
        return value

    def _visit(self, counted: bool) -> None:
        if counted:
            self.stats.interpretations += 1

    def _branch(self, kind, acc: Value, factors: List[Factor], left: FrozenSet[str], repeats: int, counted: bool) -> Value:
        closed = [node for node, fv in factors if not (fv & left)]
        if closed:
            factors = [f for f in factors if f[1] & left]
            for node in closed:
                acc = self.s.mul(acc, self.evaluate(node))
            if acc == self.zero:
                self._visit(counted)
                return self._close(kind, self.zero, len(left) + repeats)
        if not factors:
            self._visit(counted)
            return self._close(kind, acc, len(left) + repeats)
        var = self._choose(factors, left)
        rest = left - {var}
        results = []
        for bit in (False, True):
            value = self._assign(kind, acc, factors, var, bit, rest, repeats, counted)
            if kind is q.ProdVar and value == self.zero:
                return self.zero
            results.append(value)
        if kind is q.SumVar:
            return self.s.add(results[0], results[1])
        return self.s.mul(results[0], results[1])

    def _assign(self, kind, acc, factors, var, bit, rest, repeats, counted) -> Value:
        s = self.s
        next_factors = []
        for factor in factors:
            node, fv = factor
            if var not in fv:
                next_factors.append(factor)
                continue
            r = self.simplify(node, {var: bit}, rest)
            if isinstance(r, q.Const):
                acc = s.mul(acc, r.value)
                if acc == self.zero:
                    self._visit(counted)
                    return self._close(kind, self.zero, len(rest) + repeats)
            elif isinstance(r, q.Times):
                for p in r.parts:
                    if isinstance(p, q.Const):
                        acc = s.mul(acc, p.value)
                    else:
                        next_factors.append((p, q.free_vars(p)))
                if acc == self.zero:
                    self._visit(counted)
                    return self._close(kind, self.zero, len(rest) + repeats)
            else:
                next_factors.append((r, self.free(r)))
        return self._branch(kind, acc, next_factors, rest, repeats, counted)

    def _choose(self, factors: List[Factor], left: FrozenSet[str]) -> str:
        best = None
        for _, fv in factors:
            vars_here = fv & left
            if vars_here and (best is None or len(vars_here) < len(best)):
                best = vars_here
                if len(best) == 1:
                    break
        if best is None:
            raise TypeError("pending factors mention no block variable")
        return min(best)


def eval_wqbf_pruned(alpha, semiring: SemiringRef = None, stats: Optional[EvalStats] = None) -> Value:
    if sys.getrecursionlimit() < RECURSION_LIMIT:
        sys.setrecursionlimit(RECURSION_LIMIT)
    s = _semiring_of(alpha, semiring)
    evaluator = PrunedEvaluator(s, stats)
    value = evaluator.evaluate(alpha)
    logger.debug("pruned evaluation visited %d interpretations", evaluator.stats.interpretations)
    return value
