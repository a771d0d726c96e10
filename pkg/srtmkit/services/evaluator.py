# srtmkit/services/evaluator.py
"""Direct semantics of Boolean and weighted formulas over ordered structures."""
import logging
import random
from typing import Dict, List, Optional, Tuple

from config import Config
from srtmkit.errors import MixedSemirings, SignatureMismatch, TooLarge
from srtmkit.models import formulas as f
from srtmkit.models.semiring import Value, get_semiring
from srtmkit.models.structure import (
    Assignment,
    OrderedStructure,
    RelationValue,
    enumerate_tuples_lex,
    iter_relations_lex,
)

logger = logging.getLogger(__name__)

# truth values: True, False, or None while a set variable is only partly assigned
Truth = Optional[bool]


class Evaluator:
    """Evaluates formulas over one structure.

    Set variables are bound to frozensets of tuples, or to dicts of tuple -> bit
    while a sum over sets is being searched; atoms over an unassigned tuple are
    unknown and the connectives follow Kleene's strong three-valued tables.
    """

    def __init__(
        self,
        structure: OrderedStructure,
        semiring: Optional[str] = None,
        permute: Optional[random.Random] = None,
        so_cap: Optional[int] = None,
    ):
        self.structure = structure
        self.semiring = get_semiring(semiring or structure.semiring)
        if self.semiring.name != structure.semiring:
            raise MixedSemirings(
                f"structure is annotated over {structure.semiring}, evaluation asked for {self.semiring.name}"
            )
        self.n = structure.size
        self.permute = permute
        self.so_cap = Config.SO_CAP if so_cap is None else so_cap
        self._free: Dict[int, Tuple[Tuple[str, ...], bool]] = {}
        self._memo: Dict[tuple, object] = {}
        self._keep: List[object] = []
        self.so_leaves = 0

    # --- public entry points ---

    def eval_bool(self, beta, rho: Optional[Assignment] = None) -> bool:
        if not f.is_bool(beta):
            raise SignatureMismatch(f"not a Boolean formula: {f.render(beta)}")
        self._keep.append(beta)
        fo, so = self._env(rho)
        return bool(self._truth(beta, fo, so))

    def eval_weighted(self, phi, rho: Optional[Assignment] = None) -> Value:
        self._keep.append(phi)
        fo, so = self._env(rho)
        return self._value(phi, fo, so)

    def _env(self, rho: Optional[Assignment]):
        rho = rho or Assignment()
        for var, a in rho.first_order.items():
            if not 0 <= a < self.n:
                raise SignatureMismatch(f"{var} = {a} is outside the universe 0..{self.n - 1}")
        so = {var: rel.tuples for var, rel in rho.second_order.items()}
        return dict(rho.first_order), so

    # --- helpers ---

    def _elements(self, product: bool) -> List[int]:
        out = list(range(self.n))
        if product and self.permute is not None:
            self.permute.shuffle(out)
        return out

    def _cap(self, var: str, arity: int) -> None:
        if self.n ** arity > self.so_cap:
            raise TooLarge(
                f"set variable {var}/{arity} ranges over 2^{self.n ** arity} relations; "
                f"cap is n^k <= {self.so_cap}"
            )

    def _memo_key(self, node, fo) -> Optional[tuple]:
        """Key for subformulas that depend on element variables only."""
        entry = self._free.get(id(node))
        if entry is None:
            fo_vars, so_vars = f.free_split(node)
            entry = (tuple(sorted(fo_vars)), not so_vars)
            self._free[id(node)] = entry
        fo_vars, cacheable = entry
        if not cacheable:
            return None
        return (id(node),) + tuple(fo.get(v) for v in fo_vars)

    def _args(self, args, fo) -> Optional[tuple]:
        values = tuple(fo.get(v) for v in args)
        return None if None in values else values

    # --- Boolean layer ---

    def _truth(self, node, fo, so) -> Truth:
        key = self._memo_key(node, fo)
        if key is not None and key in self._memo:
            return self._memo[key]
        result = self._truth_raw(node, fo, so)
        if key is not None and result is not None:
            self._memo[key] = result
        return result

    def _truth_raw(self, node, fo, so) -> Truth:
        if isinstance(node, f.Leq):
            a, b = fo.get(node.left), fo.get(node.right)
            return a is not None and b is not None and a <= b
        if isinstance(node, f.RAtom):
            t = self._args(node.args, fo)
            if node.name not in self.structure.bool_rels:
                raise SignatureMismatch(f"structure has no relation {node.name}")
            return t is not None and self.structure.holds(node.name, t)
        if isinstance(node, f.XAtom):
            t = self._args(node.args, fo)
            rel = so.get(node.name)
            if t is None or rel is None:
                return False
            if isinstance(rel, dict):
                return rel.get(t)
            return t in rel
        if isinstance(node, f.Not):
            inner = self._truth(node.body, fo, so)
            return None if inner is None else not inner
        if isinstance(node, f.Or):
            return self._any(self._truth(p, fo, so) for p in node.parts)
        if isinstance(node, f.ExistsFO):
            saved = fo.get(node.var)
            try:
                return self._any(self._bind_truth(node, fo, so, a) for a in range(self.n))
            finally:
                _restore(fo, node.var, saved)
        if isinstance(node, f.ExistsSO):
            self._cap(node.var, node.arity)
            saved = so.get(node.var)
            try:
                results = (
                    self._truth(node.body, fo, {**so, node.var: rel})
                    for rel in iter_relations_lex(self.n, node.arity, self.so_cap)
                )
                return self._any(results)
            finally:
                _restore(so, node.var, saved)
        raise SignatureMismatch(f"not a Boolean formula: {f.render(node)}")

    def _bind_truth(self, node, fo, so, a: int) -> Truth:
        fo[node.var] = a
        return self._truth(node.body, fo, so)

    @staticmethod
    def _any(results) -> Truth:
        unknown = False
        for r in results:
            if r is True:
                return True
            if r is None:
                unknown = True
        return None if unknown else False

    # --- weighted layer ---

    def _value(self, node, fo, so) -> Value:
        key = self._memo_key(node, fo)
        if key is not None:
            key = ("w",) + key
            if key in self._memo:
                return self._memo[key]
        result = self._value_raw(node, fo, so)
        if key is not None:
            self._memo[key] = result
        return result

    def _value_raw(self, node, fo, so) -> Value:
        s = self.semiring
        if f.is_bool(node):
            truth = self._truth(node, fo, so)
            if truth is None:
                raise TooLarge(f"set variables are not fully assigned in {f.render(node)}")
            return s.one() if truth else s.zero()
        if isinstance(node, f.Const):
            if node.value.semiring != s.name:
                raise MixedSemirings(f"constant {node.value} is not a {s.name} value")
            return node.value
        if isinstance(node, f.WAtom):
            t = self._args(node.args, fo)
            if node.name not in self.structure.weighted_rels:
                raise SignatureMismatch(f"structure has no weighted relation {node.name}")
            return s.zero() if t is None else self.structure.weight(node.name, t)
        if isinstance(node, f.Plus):
            acc = s.zero()
            for p in node.parts:
                acc = s.add(acc, self._value(p, fo, so))
            return acc
        if isinstance(node, f.Times):
            return self._product(self._value(p, fo, so) for p in node.parts)
        if isinstance(node, (f.SumFO, f.ProdFO)):
            saved = fo.get(node.var)
            try:
                values = (self._bind_value(node, fo, so, a) for a in self._elements(isinstance(node, f.ProdFO)))
                if isinstance(node, f.ProdFO):
                    return self._product(values)
                acc = s.zero()
                for v in values:
                    acc = s.add(acc, v)
                return acc
            finally:
                _restore(fo, node.var, saved)
        if isinstance(node, f.SumSO):
            return self._sum_sets(node, fo, so)
        if isinstance(node, f.ProdSO):
            self._cap(node.var, node.arity)
            relations = list(iter_relations_lex(self.n, node.arity, self.so_cap))
            if self.permute is not None:
                self.permute.shuffle(relations)
            return self._product(self._value(node.body, fo, {**so, node.var: rel}) for rel in relations)
        raise SignatureMismatch(f"not a formula node: {node!r}")

    def _bind_value(self, node, fo, so, a: int) -> Value:
        fo[node.var] = a
        return self._value(node.body, fo, so)

    def _product(self, values) -> Value:
        s = self.semiring
        zero = s.zero()
        acc = s.one()
        for v in values:
            acc = s.mul(acc, v)
            if acc == zero:
                return zero
        return acc

    def _sum_sets(self, node: f.SumSO, fo, so) -> Value:
        """Sum over a block of set quantifiers by a guarded search of their bits.

        Bits are fixed tuple by tuple across the block. After each bit the
        Boolean factors of the body are evaluated three-valued, and a factor that
        is already false cuts the branch: it annihilates every completion.
        """
        chain: List[Tuple[str, int]] = []
        body = node
        while isinstance(body, f.SumSO):
            self._cap(body.var, body.arity)
            chain.append((body.var, body.arity))
            body = body.body
        factors = body.parts if isinstance(body, f.Times) else (body,)
        guards = [g for g in factors if f.is_bool(g)]

        per_var = [(var, enumerate_tuples_lex(self.n, arity)) for var, arity in chain]
        cells: List[Tuple[str, tuple]] = []
        for i in range(max(len(ts) for _, ts in per_var)):
            for var, ts in per_var:
                if i < len(ts):
                    cells.append((var, ts[i]))

        partial: Dict[str, Dict[tuple, bool]] = {var: {} for var, _ in chain}
        scope = {**so, **partial}
        s = self.semiring

        def search(idx: int) -> Value:
            if idx and any(self._truth(g, fo, scope) is False for g in guards):
                return s.zero()
            if idx == len(cells):
                self.so_leaves += 1
                done = {var: frozenset(t for t, bit in bits.items() if bit) for var, bits in partial.items()}
                return self._value(body, fo, {**so, **done})
            var, t = cells[idx]
            acc = s.zero()
            for bit in (False, True):
                partial[var][t] = bit
                acc = s.add(acc, search(idx + 1))
            del partial[var][t]
            return acc

        total = search(0)
        logger.debug("set sum over %s: %d completed assignments", [v for v, _ in chain], self.so_leaves)
        return total


def _restore(env: dict, var: str, saved) -> None:
    if saved is None:
        env.pop(var, None)
    else:
        env[var] = saved


def eval_bool(structure: OrderedStructure, rho: Optional[Assignment], beta) -> bool:
    return Evaluator(structure).eval_bool(beta, rho)


def eval_weighted(structure: OrderedStructure, rho: Optional[Assignment], phi, semiring: Optional[str] = None) -> Value:
    return Evaluator(structure, semiring).eval_weighted(phi, rho)


def relation(arity: int, tuples) -> RelationValue:
    return RelationValue(arity, frozenset(tuple(t) for t in tuples))
