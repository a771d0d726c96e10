# srtmkit/api/commands.py
import hashlib
import logging
import os
import time
from typing import Dict, Optional, Tuple

import click

from config import Config
from srtmkit.errors import FormatError
from srtmkit.models import formulas as f
from srtmkit.models.semiring import SEMIRINGS, list_semirings, parse_literal
from srtmkit.models.structure import Assignment, RelationValue
from srtmkit.models.wqbf import render_wqbf
from srtmkit.parsers.formula_parser import parse_formula
from srtmkit.parsers.text_formats import (
    parse_assignment,
    parse_budget,
    parse_machine,
    parse_signature,
    parse_structure,
    parse_word,
    render_machine,
)
from srtmkit.parsers.wqbf_parser import parse_wqbf
from srtmkit.schemas.models import CheckStatus, RunReport
from srtmkit.services.cook_levin import TimeSpaceBound, crosscheck_wqbf, machine_to_wqbf
from srtmkit.services.corpus import corpus_path
from srtmkit.services.evaluator import Evaluator
from srtmkit.services.fagin_compiler import compile_weighted, verify_equivalence
from srtmkit.services.selftest import run_selftest
from srtmkit.services.simulator import enumerate_paths, machine_value
from srtmkit.services.weso_emitter import crosscheck_weso, emit_weso
from srtmkit.services.wqbf_solver import EvalStats, eval_wqbf_naive, eval_wqbf_pruned, substitute_surrogates

logger = logging.getLogger(__name__)

semiring_option = click.option(
    "--semiring",
    type=click.Choice(sorted(SEMIRINGS)),
    default=Config.DEFAULT_SEMIRING,
    show_default=True,
    help="Semiring the values are read in.",
)
json_option = click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def read_file(path: str) -> str:
    """A path as given, or else the file of that name in the shipped corpus."""
    for candidate in (path, corpus_path(path)):
        if os.path.isfile(candidate):
            with open(candidate, encoding="utf-8") as fh:
                return fh.read()
    raise FormatError(f"no such file: {path}")


def read_text(value: str) -> str:
    """Formulas may be given inline or as a file."""
    if os.path.isfile(value) or os.path.isfile(corpus_path(value)):
        return read_file(value)
    return value


def write_artifact(text: str, out: str) -> None:
    if out == "-":
        click.echo(text)
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    logger.info("wrote %s", out)


def build_assignment(text: Optional[str]) -> Tuple[Assignment, Dict[str, int]]:
    first, second = {}, {}
    for name, value in parse_assignment(text or "").items():
        if isinstance(value, RelationValue):
            second[name] = value
        else:
            first[name] = value
    return Assignment(first, second), {name: rel.arity for name, rel in second.items()}


def emit(report: RunReport, as_json: bool, started: float) -> int:
    report.elapsed_ms = (time.perf_counter() - started) * 1000
    click.echo(report.to_json() if as_json else report.to_text())
    return 1 if report.status == CheckStatus.FAIL else 0


@click.group()
def cli():
    """Semiring Turing machines, weighted logics and the translations between them."""


@cli.command("eval-machine")
@click.option("--machine", "machine_file", required=True, help="Machine file in the srtm text format.")
@click.option("--input", "word_text", default="", help='Weighted word, e.g. "a a #2 #3".')
@semiring_option
@click.option("--budget", default=None, help="Step budget: an integer or a polynomial in n.")
@click.option("--paths", is_flag=True, help="Also list every computation path.")
@json_option
def eval_machine(machine_file, word_text, semiring, budget, paths, as_json):
    """Sum over all computation paths of the product of their weights."""
    started = time.perf_counter()
    text = read_file(machine_file)
    m = parse_machine(text, semiring)
    word = parse_word(word_text, semiring)
    steps = parse_budget(budget if budget is not None else str(Config.DEFAULT_BUDGET))(len(word))
    value = machine_value(m, word, steps)
    report = RunReport(
        command="eval-machine",
        semiring=semiring,
        inputs={"machine": digest(text), "word": digest(word.render())},
        budget=steps,
        result=str(value),
    )
    if paths:
        found = enumerate_paths(m, word, steps)
        report.details["paths"] = str(len(found))
        for i, (path, weight) in enumerate(found):
            report.details[f"path.{i}"] = f"{weight} ({len(path)} steps)"
    return emit(report, as_json, started)


@cli.command("eval-formula")
@click.option("--formula", "formula_text", required=True, help="Formula text or a file holding it.")
@click.option("--structure", "structure_file", required=True, help="Structure file.")
@semiring_option
@click.option("--assign", "assignment", default="", help="Free variables, e.g. x=1,X={(0),(1)}.")
@json_option
def eval_formula(formula_text, structure_file, semiring, assignment, as_json):
    """Evaluate a weighted formula on an ordered structure."""
    started = time.perf_counter()
    structure_text = read_file(structure_file)
    structure, sig = parse_structure(structure_text, semiring)
    rho, free_sets = build_assignment(assignment)
    text = read_text(formula_text)
    phi = parse_formula(text, sig, semiring, free_sets)
    value = Evaluator(structure, semiring).eval_weighted(phi, rho)
    report = RunReport(
        command="eval-formula",
        semiring=semiring,
        inputs={"formula": digest(text), "structure": digest(structure_text)},
        details={"fragment": f.classify(phi).value},
        result=str(value),
    )
    return emit(report, as_json, started)


@cli.command("eval-wqbf")
@click.option("--formula", "formula_text", required=True, help="Weighted QBF text or a file holding it.")
@semiring_option
@click.option("--input", "word_text", default=None, help="Word whose values replace surr@i.")
@click.option("--const", "consts", multiple=True, help="Named surrogate, e.g. r0=#2.")
@click.option("--naive", is_flag=True, help="Use the literal semantics instead of the pruned search.")
@json_option
def eval_wqbf(formula_text, semiring, word_text, consts, naive, as_json):
    """Evaluate a weighted QBF."""
    started = time.perf_counter()
    text = read_text(formula_text)
    alpha = parse_wqbf(text, semiring)
    named = {}
    for item in consts:
        name, sep, value = item.partition("=")
        if not sep:
            raise FormatError(f"cannot read constant '{item}'; use name=#value")
        named[name.strip()] = parse_literal(value.strip(), semiring)
    inputs = {"formula": digest(text)}
    if word_text is not None or named:
        word = parse_word(word_text or "", semiring)
        alpha = substitute_surrogates(alpha, word, named, semiring)
        inputs["word"] = digest(word.render())
    stats = EvalStats()
    if naive:
        value = eval_wqbf_naive(alpha, semiring=semiring, stats=stats)
    else:
        value = eval_wqbf_pruned(alpha, semiring, stats)
    report = RunReport(
        command="eval-wqbf",
        semiring=semiring,
        inputs=inputs,
        details={"evaluator": "naive" if naive else "pruned", "interpretations": str(stats.interpretations)},
        result=str(value),
    )
    return emit(report, as_json, started)


@cli.command("compile-formula")
@click.option("--formula", "formula_text", required=True, help="wESO formula text or a file holding it.")
@click.option("--signature", "signature_file", default=None, help="Signature file.")
@semiring_option
@click.option("--out", default="-", show_default=True, help="Where to write the machine.")
@click.option("--verify", is_flag=True, help="Compare the machine with the formula on --structure.")
@click.option("--structure", "structure_file", default=None, help="Structure used by --verify.")
@click.option("--assign", "assignment", default="", help="Free variables used by --verify.")
@json_option
def compile_formula(formula_text, signature_file, semiring, out, verify, structure_file, assignment, as_json):
    """Compile a wESO formula into a machine reading encoded structures."""
    started = time.perf_counter()
    if signature_file is None and structure_file is None:
        raise click.UsageError("give --signature or --structure")
    text = read_text(formula_text)
    inputs = {"formula": digest(text)}
    structure = None
    if structure_file is not None:
        structure_text = read_file(structure_file)
        structure, sig = parse_structure(structure_text, semiring)
        inputs["structure"] = digest(structure_text)
    if signature_file is not None:
        signature_text = read_file(signature_file)
        sig = parse_signature(signature_text)
        inputs["signature"] = digest(signature_text)
    rho, free_sets = build_assignment(assignment)
    phi = parse_formula(text, sig, semiring, free_sets)
    compiled = compile_weighted(phi, sig, semiring)
    write_artifact(render_machine(compiled.machine), out)
    summary = compiled.summary()
    report = RunReport(
        command="compile-formula",
        semiring=semiring,
        inputs=inputs,
        details={
            "fragment": summary.fragment,
            "states": str(summary.state_count),
            "transitions": str(summary.transition_count),
            "tape_symbols": str(summary.tape_symbol_count),
            "budget_hint": ",".join(str(c) for c in summary.budget_hint),
        },
    )
    if verify:
        if structure is None:
            raise click.UsageError("--verify needs --structure")
        check = verify_equivalence(phi, structure, sig, rho, compiled)
        report.checks.append(check)
        report.status = check.status
    return emit(report, as_json, started)


@cli.command("compile-machine")
@click.option("--machine", "machine_file", required=True, help="Machine file in the srtm text format.")
@click.option("--to", "target", type=click.Choice(["wqbf", "weso"]), required=True)
@semiring_option
@click.option("--input-length", type=int, default=None, help="Input length n for --to wqbf.")
@click.option("--input", "shape_text", default=None, help="Word fixing which positions hold letters (wqbf).")
@click.option("--poly", default=None, help="Bound p(n) as ascending coefficients, e.g. 1,0,2 (wqbf).")
@click.option("--k", "k", type=int, default=None, help="Tuple width of time and positions (weso).")
@click.option("--signature", "signature_file", default=None, help="Signature of the structures read (weso).")
@click.option("--out", default="-", show_default=True, help="Where to write the formula.")
@json_option
def compile_machine(machine_file, target, semiring, input_length, shape_text, poly, k, signature_file, out, as_json):
    """Encode a machine as a weighted QBF or as a wESO sentence."""
    started = time.perf_counter()
    text = read_file(machine_file)
    m = parse_machine(text, semiring)
    report = RunReport(command="compile-machine", semiring=semiring, inputs={"machine": digest(text)})
    if target == "wqbf":
        if poly is None:
            raise click.UsageError("--to wqbf needs --poly")
        shape = parse_word(shape_text, semiring) if shape_text is not None else None
        if input_length is None:
            if shape is None:
                raise click.UsageError("--to wqbf needs --input-length or --input")
            input_length = len(shape)
        bound = TimeSpaceBound.parse(poly)
        alpha, atlas = machine_to_wqbf(m, input_length, bound, shape=shape)
        write_artifact(render_wqbf(alpha), out)
        report.budget = bound.at(input_length)
        report.details["variables"] = str(len(atlas.variables()))
        for name, value in atlas.named_values.items():
            report.details[f"surr:{name}"] = str(value)
    else:
        if signature_file is None:
            raise click.UsageError("--to weso needs --signature")
        signature_text = read_file(signature_file)
        sig = parse_signature(signature_text)
        report.inputs["signature"] = digest(signature_text)
        if k is None:
            k = 1 + max((arity for _, arity in sig.bool_relations + sig.weighted_relations), default=0)
        emission = emit_weso(m, k, sig)
        write_artifact(f.render(emission.sentence), out)
        report.details.update({
            "k": str(k),
            "fragment": f.classify(emission.sentence).value,
            "constant_transitions": str(len(emission.constant_transitions)),
            "cell_transitions": str(len(emission.cell_transitions)),
            "padding": str(len(emission.padding)),
        })
    return emit(report, as_json, started)


@cli.command("crosscheck")
@click.option("--machine", "machine_file", required=True, help="Machine file in the srtm text format.")
@click.option("--input", "word_text", default="", help="Weighted word for the weighted QBF check.")
@semiring_option
@click.option("--poly", default=None, help="Bound p(n) as ascending coefficients.")
@click.option("--structure", "structure_file", default=None, help="Check the wESO sentence on this structure instead.")
@click.option("--k", "k", type=int, default=None, help="Tuple width for the wESO check.")
@json_option
def crosscheck(machine_file, word_text, semiring, poly, structure_file, k, as_json):
    """Compare an encoded formula's value with the simulator."""
    started = time.perf_counter()
    text = read_file(machine_file)
    m = parse_machine(text, semiring)
    report = RunReport(command="crosscheck", semiring=semiring, inputs={"machine": digest(text)})
    if structure_file is not None:
        structure_text = read_file(structure_file)
        structure, sig = parse_structure(structure_text, semiring)
        report.inputs["structure"] = digest(structure_text)
        if k is None:
            k = 1 + max((arity for _, arity in sig.bool_relations + sig.weighted_relations), default=0)
        check = crosscheck_weso(m, k, structure, sig)
    else:
        if poly is None:
            raise click.UsageError("crosscheck needs --poly or --structure")
        word = parse_word(word_text, semiring)
        report.inputs["word"] = digest(word.render())
        check = crosscheck_wqbf(m, word, TimeSpaceBound.parse(poly))
    report.checks.append(check)
    report.budget = check.budget
    report.result = check.left_value
    report.status = check.status
    return emit(report, as_json, started)


@cli.command("list-semirings")
@json_option
def list_semirings_command(as_json):
    """Registered semirings."""
    started = time.perf_counter()
    report = RunReport(command="list-semirings")
    for row in list_semirings():
        idempotent = "idempotent" if row.plus_idempotent else "not idempotent"
        report.details[row.name] = f"{row.carrier}, {idempotent}"
    return emit(report, as_json, started)


@cli.command("selftest")
@click.option("--seed", type=int, default=None, help="Seed for the randomized checks.")
@click.option("--corpus", "directory", default=None, help="Corpus directory.")
@json_option
def selftest(seed, directory, as_json):
    """Seeded, reduced property checks over the shipped corpus."""
    started = time.perf_counter()
    seed = Config.SEED if seed is None else seed
    checks = run_selftest(seed, directory)
    report = RunReport(command="selftest", details={"seed": str(seed)}, checks=checks)
    report.status = CheckStatus.PASS if all(c.passed for c in checks) else CheckStatus.FAIL
    for check in checks:
        if not check.passed:
            logger.warning("selftest %s failed: %s", check.name, check.message)
    return emit(report, as_json, started)
