# srtmkit/services/selftest.py
"""A seeded, reduced run of the property checks over the shipped corpus."""
import logging
import random
from dataclasses import replace
from typing import Callable, Iterable, List, Optional, Tuple

from config import Config
from srtmkit.errors import SrtmError
from srtmkit.models.machine import Weight, WeightedWord
from srtmkit.models.semiring import SEMIRINGS, fold_add, get_semiring, law_violations
from srtmkit.parsers.text_formats import parse_word
from srtmkit.schemas.models import CheckReport, CheckStatus
from srtmkit.services import corpus, samples
from srtmkit.services.simulator import enumerate_paths, initial_configuration, machine_value, machine_value_from
from srtmkit.services.wqbf_solver import EvalStats, eval_wqbf_naive, eval_wqbf_pruned

logger = logging.getLogger(__name__)

PRODUCT_BUDGET = 200
PATH_BUDGET = 30

# (description, passed) for one case
Case = Tuple[str, bool]


def _report(name: str, cases: Iterable[Case]) -> CheckReport:
    total, failures = 0, []
    try:
        for description, passed in cases:
            total += 1
            if not passed:
                failures.append(description)
    except SrtmError as e:
        failures.append(f"{type(e).__name__}: {e}")
    logger.info("selftest %s: %d cases, %d failures", name, total, len(failures))
    return CheckReport(
        name=name,
        status=CheckStatus.FAIL if failures else CheckStatus.PASS,
        left_label="cases",
        left_value=str(total),
        right_label="failures",
        right_value=str(len(failures)),
        message=failures[0] if failures else "",
    )


def conditional_product_cases(rng: random.Random, directory: Optional[str], rounds: int) -> Iterable[Case]:
    m = corpus.load_machine("condprod", "nat", directory)
    got = machine_value(m, parse_word("a #1", "nat"), PRODUCT_BUDGET)
    yield "a #1", got == get_semiring("nat").one()
    for name in ("nat", "trop"):
        m = corpus.load_machine("condprod", name, directory)
        for _ in range(rounds):
            for word in (
                samples.well_formed_product_input(rng, name),
                samples.malformed_product_input(rng, name),
            ):
                got = machine_value(m, word, PRODUCT_BUDGET)
                yield f"{name}: {word.render()}", got == corpus.conditional_product(word, name)


def empty_sum_cases(rng: random.Random, rounds: int) -> Iterable[Case]:
    for _ in range(rounds):
        m = samples.random_layered_machine(rng, "nat")
        word = samples.random_word(rng, "nat", rng.randint(0, 3))
        parked = replace(initial_configuration(m, word), state=samples.SINK)
        got = machine_value_from(m, parked, 1)
        yield f"sink on {word.render()}", got == get_semiring("nat").one()


def path_sum_cases(rng: random.Random, directory: Optional[str], max_length: int) -> Iterable[Case]:
    machines = dict(corpus.load_machines("nat", directory))
    machines.update(corpus.small_machines("nat"))
    for name, m in sorted(machines.items()):
        letters = sorted(m.input_alphabet)
        for length in range(max_length + 1):
            word = samples.random_word(rng, "nat", length, letters)
            paths = enumerate_paths(m, word, PATH_BUDGET)
            total = fold_add((w for _, w in paths), m.semiring)
            yield f"{name} on '{word.render()}'", total == machine_value(m, word, PATH_BUDGET)


def wqbf_cases(rng: random.Random, rounds: int, max_vars: int) -> Iterable[Case]:
    for name in ("nat", "trop"):
        for _ in range(rounds):
            count = rng.randint(1, max_vars)
            alpha = samples.random_wqbf(rng, name, count)
            naive_stats, pruned_stats = EvalStats(), EvalStats()
            naive = eval_wqbf_naive(alpha, semiring=name, stats=naive_stats)
            pruned = eval_wqbf_pruned(alpha, name, pruned_stats)
            ok = naive == pruned and pruned_stats.interpretations <= 2 ** count
            yield f"{name} formula over {count} variables", ok


def limrec_cases() -> Iterable[Case]:
    s = get_semiring("nat")
    m = corpus.limrec_machine({s.one()}, "nat")
    for given, expected in ((1, 1), (2, 3), (0, 1)):
        word = WeightedWord((Weight(s.parse(str(given))),))
        yield f"#{given}", machine_value(m, word, 1) == s.parse(str(expected))


def semiring_law_cases(rng: random.Random, rounds: int) -> Iterable[Case]:
    for name, s in SEMIRINGS.items():
        for _ in range(rounds):
            a, b, c = s.sample(rng), s.sample(rng), s.sample(rng)
            broken = law_violations(s, a, b, c)
            yield f"{name}: {', '.join(broken)} on {a}, {b}, {c}", not broken


def run_selftest(seed: Optional[int] = None, directory: Optional[str] = None) -> List[CheckReport]:
    seed = Config.SEED if seed is None else seed
    rng = random.Random(seed)
    checks: List[Tuple[str, Callable[[], Iterable[Case]]]] = [
        ("conditional-product", lambda: conditional_product_cases(rng, directory, 10)),
        ("empty-sum", lambda: empty_sum_cases(rng, 10)),
        ("path-sum", lambda: path_sum_cases(rng, directory, 3)),
        ("wqbf-pruning", lambda: wqbf_cases(rng, 20, 8)),
        ("limrec", limrec_cases),
        ("semiring-laws", lambda: semiring_law_cases(rng, 100)),
    ]
    return [_report(name, make()) for name, make in checks]
