# srtmkit/services/fagin_compiler.py
"""Compiling formulas into machines that read the encoding of a structure.

The compiled machine first tags the input: the 0^n prefix stands for the
universe, and every later cell learns which relation block (or free
variable block) it belongs to. Element variables are then marks on prefix
cells, a set variable is a fresh block of n^k bits written after the input,
and an atom is looked up by walking a pointer through its block in step with
a tuple of cursors on the prefix.

Sums become nondeterministic choices and products become sequential runs, so
the machine has exactly one run per choice of the summed elements and sets,
and every transition except constants, weighted atoms and the rejecting sink
carries the weight one.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import sympy

from config import Config
from srtmkit.errors import NotWESO, SignatureMismatch, UnsupportedConstruct
from srtmkit.models import formulas as f
from srtmkit.models.machine import ConstWeight, FromCell, Machine
from srtmkit.models.semiring import SemiringRef, get_semiring
from srtmkit.models.structure import Assignment, FreeValue, OrderedStructure, Signature, encode_structure
from srtmkit.schemas.models import CheckReport, CheckStatus, CompilationSummary
from srtmkit.services.evaluator import Evaluator
from srtmkit.services.machine_builder import (
    BLANK,
    ORIGIN,
    PLACEHOLDER,
    POINTER,
    Cell,
    MachineBuilder,
    alphabet,
    cursor,
)
from srtmkit.services.simulator import machine_value

logger = logging.getLogger(__name__)

_N = sympy.Symbol("n")


@dataclass(frozen=True)
class FreeSlot:
    """A free variable read from the trailing blocks of the encoding; arity 0 marks an element."""
    name: str
    arity: int


@dataclass(frozen=True)
class CompilationReport:
    formula: object
    machine: Machine
    free_order: Tuple[FreeSlot, ...]
    budget_hint: Tuple[int, ...]

    @property
    def state_count(self) -> int:
        return len(self.machine.states)

    @property
    def transition_count(self) -> int:
        return len(self.machine.transitions)

    def budget(self, n: int) -> int:
        return sum(c * n ** i for i, c in enumerate(self.budget_hint))

    def free_values(self, rho: Optional[Assignment] = None) -> List[FreeValue]:
        rho = rho or Assignment()
        out: List[FreeValue] = []
        for slot in self.free_order:
            if slot.arity == 0:
                if slot.name not in rho.first_order:
                    raise SignatureMismatch(f"free variable {slot.name} has no value")
                out.append(rho.first_order[slot.name])
            else:
                if slot.name not in rho.second_order:
                    raise SignatureMismatch(f"free set variable {slot.name} has no value")
                out.append(rho.second_order[slot.name])
        return out

    def summary(self) -> CompilationSummary:
        return CompilationSummary(
            formula=f.render(self.formula),
            fragment=f.classify(self.formula).value,
            state_count=self.state_count,
            transition_count=self.transition_count,
            tape_symbol_count=len(self.machine.tape_alphabet),
            budget_hint=list(self.budget_hint),
        )


# --- preparation ---

def _so_arities(node, out: Dict[str, int]) -> Dict[str, int]:
    if isinstance(node, f.XAtom):
        out.setdefault(node.name, len(node.args))
    for child in f.children(node):
        _so_arities(child, out)
    return out


def _find(node, kind):
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, kind):
            return n
        stack.extend(f.children(n))
    return None


def _reject_unsupported(node) -> None:
    existential = _find(node, f.ExistsSO)
    if existential is not None:
        raise UnsupportedConstruct(f"existential set quantifiers are not compiled: {f.render(existential)}")


class _Renamer:
    """Gives every binder its own mark (elements) or tag (sets)."""

    def __init__(self):
        self.marks: List[str] = []
        self.regions: List[Tuple[str, int]] = []

    def mark(self) -> str:
        name = f"v{len(self.marks)}"
        self.marks.append(name)
        return name

    def region(self, arity: int) -> str:
        name = f"Z{len(self.regions)}"
        self.regions.append((name, arity))
        return name

    def rename(self, node, fo: Dict[str, str], so: Dict[str, str]):
        if isinstance(node, f.Leq):
            return f.Leq(fo[node.left], fo[node.right])
        if isinstance(node, (f.RAtom, f.WAtom)):
            return type(node)(node.name, tuple(fo[a] for a in node.args))
        if isinstance(node, f.XAtom):
            return f.XAtom(so[node.name], tuple(fo[a] for a in node.args))
        if isinstance(node, f.Const):
            return node
        if isinstance(node, f.Not):
            return f.Not(self.rename(node.body, fo, so))
        if isinstance(node, (f.Or, f.Plus, f.Times)):
            return type(node)(tuple(self.rename(p, fo, so) for p in node.parts))
        if isinstance(node, (f.ExistsFO, f.SumFO, f.ProdFO)):
            v = self.mark()
            return type(node)(v, self.rename(node.body, {**fo, node.var: v}, so))
        if isinstance(node, f.SumSO):
            z = self.region(node.arity)
            return f.SumSO(z, node.arity, self.rename(node.body, fo, {**so, node.var: z}))
        raise UnsupportedConstruct(f"cannot compile {f.render(node)}")


# --- compiler ---

class _Compiler:
    def __init__(self, phi, sig: Signature, semiring: SemiringRef):
        _reject_unsupported(phi)
        self.sig = sig
        self.semiring = get_semiring(semiring)
        fo_free, so_free = f.free_split(phi)
        arities = _so_arities(phi, {})
        self.free_order = tuple(
            FreeSlot(name, arities[name] if name in so_free else 0) for name in sorted(fo_free | so_free)
        )

        self.blocks: List[Tuple[str, int, Tuple[str, ...]]] = []
        self.tags: Dict[str, str] = {}
        for name, k in sig.bool_relations:
            self.tags[name] = self._block(k, ("0", "1"))
        for name, k in sig.weighted_relations:
            self.tags[name] = self._block(k, (PLACEHOLDER,))
        renamer = _Renamer()
        fo_env: Dict[str, str] = {}
        so_env: Dict[str, str] = {}
        self.free_marks: List[Tuple[str, str]] = []
        for slot in self.free_order:
            tag = self._block(max(slot.arity, 1), ("0", "1"))
            if slot.arity == 0:
                fo_env[slot.name] = renamer.mark()
                self.free_marks.append((fo_env[slot.name], tag))
            else:
                so_env[slot.name] = tag
        self.formula = renamer.rename(phi, fo_env, so_env)
        self.regions = renamer.regions

        arities_used = [k for _, k, _ in self.blocks] + [k for _, k in self.regions] + [1]
        self.width = max(arities_used)
        cursors = [cursor(i) for i in range(1, self.width + 1)]
        tagged = {tag: bases for tag, _, bases in self.blocks}
        tagged.update({tag: ("0", "1") for tag, _ in self.regions})
        self.b = MachineBuilder(self.semiring, alphabet(renamer.marks + cursors, tagged))

    def _block(self, arity: int, bases: Tuple[str, ...]) -> str:
        tag = f"B{len(self.blocks)}"
        self.blocks.append((tag, arity, bases))
        return tag

    def _tag(self, name: str) -> str:
        if name not in self.tags:
            raise SignatureMismatch(f"relation {name} is not in the signature")
        return self.tags[name]

    # --- input preparation ---

    def prepare(self, body: str) -> str:
        """Tag the prefix, every block, and mark free elements; then enter `body`."""
        b = self.b
        start, prefix = b.fresh("start"), b.fresh("prefix")
        nxt = body
        for mark, tag in reversed(self.free_marks):
            nxt = self._read_free_element(mark, tag, nxt)
        for tag, arity, bases in reversed(self.blocks):
            nxt = self._tag_block(tag, arity, bases, nxt)
        origin = Cell("0", "P", frozenset(("^",)))
        b.on(start, lambda c: c == Cell("0"), prefix, write=lambda c: origin)
        b.reject(start, lambda c: c != Cell("0"))
        b.on(prefix, lambda c: c == Cell("0"), prefix, write=lambda c: Cell("0", "P"))
        b.on(prefix, lambda c: c == Cell("1"), b.home(nxt), direction=-1, write=lambda c: Cell("1", "S"))
        b.reject(prefix, lambda c: c.tag == "" and c.base in (PLACEHOLDER, BLANK))
        return start

    def _tag_block(self, tag: str, arity: int, bases: Tuple[str, ...], then: str) -> str:
        b = self.b
        cursors = [cursor(i) for i in range(1, arity + 1)]
        seek = b.seek(lambda c: c.tag == "", "tag")
        step = b.odometer_step(arity, seek, then)
        b.on(seek, lambda c: c.tag == "" and c.base in bases, b.home(step), direction=-1,
             write=lambda c: Cell(c.base, tag))
        b.reject(seek, lambda c: c.tag == "" and c.base not in bases)
        return b.at_origin(seek, write=lambda c: c.plus(*cursors))

    def _read_free_element(self, mark: str, tag: str, then: str) -> str:
        b = self.b
        c1 = cursor(1)
        probe, shift, put = b.fresh("probe"), b.fresh("shift"), b.fresh("put")
        place = b.seek(lambda c: c.tag == tag, "place")
        b.on(place, lambda c: c.tag == tag, b.home(probe), direction=-1, write=lambda c: c.plus(POINTER))
        step = b.odometer_step(1, probe, b.fail)
        b.on(probe, lambda c: not c.has(POINTER), probe)
        b.on(probe, lambda c: c.has(POINTER) and c.base == "1", b.home(put), direction=-1,
             write=lambda c: c.minus(POINTER))
        b.on(probe, lambda c: c.has(POINTER) and c.base == "0", shift, write=lambda c: c.minus(POINTER))
        b.on(shift, lambda c: c.tag == tag, b.home(step), direction=-1, write=lambda c: c.plus(POINTER))
        b.reject(shift, lambda c: c.tag != tag)
        b.on(put, lambda c: c.is_prefix and not c.has(c1), put)
        b.on(put, lambda c: c.is_prefix and c.has(c1), b.home(then), direction=-1,
             write=lambda c: c.minus(c1).plus(mark))
        return b.at_origin(place, write=lambda c: c.plus(c1))

    # --- Boolean formulas: two exits ---

    def test(self, node, yes: str, no: str) -> str:
        b = self.b
        if isinstance(node, f.Leq):
            x, y = node.left, node.right
            scan = b.fresh("leq")
            b.on(scan, lambda c: c.is_prefix and c.has(x), b.home(yes), direction=-1)
            b.on(scan, lambda c: c.is_prefix and not c.has(x) and c.has(y), b.home(no), direction=-1)
            b.on(scan, lambda c: c.is_prefix and not c.has(x) and not c.has(y), scan)
            b.on(scan, lambda c: c.is_separator, b.home(no), direction=-1)
            return scan
        if isinstance(node, (f.RAtom, f.XAtom)):
            tag = self._tag(node.name) if isinstance(node, f.RAtom) else node.name
            entry, at_pointer = b.lookup(tag, node.args)
            b.on(at_pointer, lambda c: c.has(POINTER) and c.base == "1", b.home(yes), direction=-1,
                 write=lambda c: c.minus(POINTER))
            b.on(at_pointer, lambda c: c.has(POINTER) and c.base == "0", b.home(no), direction=-1,
                 write=lambda c: c.minus(POINTER))
            return entry
        if isinstance(node, f.Not):
            return self.test(node.body, no, yes)
        if isinstance(node, f.Or):
            nxt = no
            for part in reversed(node.parts):
                nxt = self.test(part, yes, nxt)
            return nxt
        if isinstance(node, f.ExistsFO):
            v = node.var
            advance, step = b.fresh("advance"), b.fresh("next")
            body = self.test(node.body, b.prefix_map(lambda c: c.minus(v), yes), advance)
            self._advance(v, advance, step, body, no)
            return b.at_origin(body, write=lambda c: c.plus(v))
        raise UnsupportedConstruct(f"cannot compile {f.render(node)}")

    def _advance(self, v: str, advance: str, step: str, again: str, done: str) -> None:
        """Move the mark v one prefix cell right and enter `again`, or drop it at the end and enter `done`."""
        b = self.b
        b.on(advance, lambda c: c.is_prefix and not c.has(v), advance)
        b.on(advance, lambda c: c.is_prefix and c.has(v), step, write=lambda c: c.minus(v))
        b.on(step, lambda c: c.is_prefix, b.home(again), direction=-1, write=lambda c: c.plus(v))
        b.on(step, lambda c: c.is_separator, b.home(done), direction=-1)

    # --- weighted formulas: one exit ---

    def run(self, node, done: str) -> str:
        b = self.b
        if f.is_bool(node):
            return self.test(node, done, b.fail)
        if isinstance(node, f.Const):
            self.semiring._own(node.value)
            return b.at_origin(done, weight=ConstWeight(node.value))
        if isinstance(node, f.WAtom):
            entry, at_pointer = b.lookup(self._tag(node.name), node.args)
            b.on(at_pointer, lambda c: c.has(POINTER) and c.base == PLACEHOLDER, b.home(done), direction=-1,
                 write=lambda c: c.minus(POINTER), weight=FromCell())
            return entry
        if isinstance(node, f.Plus):
            choose = b.fresh("choose")
            for part in node.parts:
                b.on(choose, lambda c: c.has(ORIGIN), b.bounce(self.run(part, done)))
            return choose
        if isinstance(node, f.Times):
            nxt = done
            for part in reversed(node.parts):
                nxt = self.run(part, nxt)
            return nxt
        if isinstance(node, f.SumFO):
            v = node.var
            body = self.run(node.body, b.prefix_map(lambda c: c.minus(v), done))
            guess = b.fresh("guess")
            b.on(guess, lambda c: c.is_prefix, b.home(body), direction=-1, write=lambda c: c.plus(v))
            b.on(guess, lambda c: c.is_prefix, guess)
            b.reject(guess, lambda c: c.is_separator)
            return guess
        if isinstance(node, f.ProdFO):
            v = node.var
            advance, step = b.fresh("advance"), b.fresh("next")
            body = self.run(node.body, advance)
            self._advance(v, advance, step, body, done)
            return b.at_origin(body, write=lambda c: c.plus(v))
        if isinstance(node, f.SumSO):
            return self._sum_sets(node, done)
        raise UnsupportedConstruct(f"cannot compile {f.render(node)}")

    def _sum_sets(self, node: f.SumSO, done: str) -> str:
        b = self.b
        tag, k = node.var, node.arity
        cursors = [cursor(i) for i in range(1, k + 1)]
        erase = b.fresh("erase")
        body = self.run(node.body, erase)
        b.on(erase, lambda c: c.tag != tag and not c.is_blank, erase)
        b.on(erase, lambda c: c.tag == tag, erase, write=lambda c: Cell(BLANK))
        b.on(erase, lambda c: c.is_blank, b.home(done), direction=-1)

        seek = b.seek(lambda c: c.is_blank, "grow")
        step = b.odometer_step(k, seek, body)
        for bit in ("0", "1"):
            b.on(seek, lambda c: c.is_blank, b.home(step), direction=-1, write=lambda c, bit=bit: Cell(bit, tag))
        return b.at_origin(seek, write=lambda c: c.plus(*cursors))

    # --- budget ---

    def budget_hint(self) -> Tuple[int, ...]:
        n = _N
        length = n + 1 + sum(n ** k for _, k, _ in self.blocks)
        extent = length + sum(n ** k for _, k in self.regions) + 2
        sweep = 2 * extent + 8

        def odometer(k):
            return 2 * (k + 1) * sweep

        def lookup(k):
            return n ** k * (3 * sweep + odometer(k)) + 4 * sweep

        def cost(node):
            if isinstance(node, f.Leq):
                return sweep
            if isinstance(node, (f.RAtom, f.XAtom, f.WAtom)):
                return lookup(len(node.args)) + 2
            if isinstance(node, f.Const):
                return 2
            if isinstance(node, f.Not):
                return cost(node.body)
            if isinstance(node, (f.Or, f.Plus, f.Times)):
                return sum(cost(p) for p in node.parts) + 2 * len(node.parts)
            if isinstance(node, (f.ExistsFO, f.ProdFO)):
                return 2 + n * (cost(node.body) + 2 * sweep) + sweep
            if isinstance(node, f.SumFO):
                return 2 * sweep + cost(node.body)
            if isinstance(node, f.SumSO):
                return 2 + n ** node.arity * (sweep + odometer(node.arity)) + cost(node.body) + sweep
            raise UnsupportedConstruct(f"cannot compile {f.render(node)}")

        total = sweep
        total += sum(2 + n ** k * (sweep + odometer(k)) for _, k, _ in self.blocks)
        total += len(self.free_marks) * (lookup(1) + sweep)
        total += cost(self.formula) + 4
        poly = sympy.Poly(sympy.expand(total), n)
        return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _semiring_for(phi, semiring: SemiringRef) -> SemiringRef:
    if semiring is not None:
        return semiring
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, f.Const):
            return node.value.semiring
        stack.extend(f.children(node))
    return Config.DEFAULT_SEMIRING


# --- public entry points ---

def compile_bool(beta, sig: Signature, semiring: SemiringRef = None) -> Machine:
    """A deterministic machine with value one when beta holds and zero otherwise."""
    if not f.is_bool(beta):
        raise SignatureMismatch(f"not a Boolean formula: {f.render(beta)}")
    return compile_weighted(beta, sig, semiring).machine


def compile_weighted(phi, sig: Signature, semiring: SemiringRef = None) -> CompilationReport:
    product = _find(phi, f.ProdSO)
    if product is not None:
        raise UnsupportedConstruct(f"products over sets are not compiled: {f.render(product)}")
    fragment = f.classify(phi)
    if fragment == f.Fragment.WSO:
        raise NotWESO(f"{f.render(phi)} is {fragment.value}, not in wESO")
    c = _Compiler(phi, sig, _semiring_for(phi, semiring))
    accept = c.b.fresh("accept")
    start = c.prepare(c.run(c.formula, accept))
    report = CompilationReport(phi, c.b.build(start), c.free_order, c.budget_hint())
    logger.info(
        "compiled %s: %d states, %d transitions",
        f.render(phi), report.state_count, report.transition_count,
    )
    return report


def verify_equivalence(
    phi,
    structure: OrderedStructure,
    sig: Signature,
    rho: Optional[Assignment] = None,
    report: Optional[CompilationReport] = None,
) -> CheckReport:
    """Compare the compiled machine on enc(A) with the direct semantics."""
    direct = Evaluator(structure).eval_weighted(phi, rho)
    report = report or compile_weighted(phi, sig, structure.semiring)
    word = encode_structure(structure, sig, report.free_values(rho))
    budget = report.budget(structure.size)
    compiled = machine_value(report.machine, word, budget)
    passed = compiled == direct
    return CheckReport(
        name="capture",
        status=CheckStatus.PASS if passed else CheckStatus.FAIL,
        left_label="machine",
        left_value=str(compiled),
        right_label="formula",
        right_value=str(direct),
        budget=budget,
        message="" if passed else "compiled machine and direct semantics disagree",
    )
