import logging
from dataclasses import replace

import pytest

from srtmkit.errors import BudgetExceeded, InvalidMachine, LetterNotInInputAlphabet, NotApplicable
from srtmkit.models.machine import ConstWeight, RecognitionFn, Transition, validate_machine
from srtmkit.models.semiring import fold_add, get_semiring, parse_value
from srtmkit.parsers.text_formats import parse_machine, parse_word, render_machine
from srtmkit.schemas.models import DiagnosticCode
from srtmkit.services import corpus, samples
from srtmkit.services.simulator import (
    applicable_transitions,
    enumerate_paths,
    initial_configuration,
    machine_value,
    rec_apply,
    step,
    unused_known_values,
)

LAYERED_BUDGET = 6
SIMULATOR_LOGGER = "srtmkit.services.simulator"


def nat(text):
    return parse_value(text, "nat")


class TestSimulator:

    @staticmethod
    def test_conditional_product_trace(condprod):
        word = parse_word("a #1", "nat")
        c = initial_configuration(condprod, word)
        assert c.symbols == ("a", "X") and c.head == 0
        states, weights = [c.state], []
        while applicable_transitions(condprod, c):
            (t,) = applicable_transitions(condprod, c)
            c, w = step(condprod, c, t)
            states.append(c.state)
            weights.append(w)
        assert states == ["init", "right", "right", "turn_left", "left", "turn_right", "fin"]
        assert weights == [nat("1")] * 6
        assert machine_value(condprod, word, 20) == nat("1")

    @staticmethod
    def test_conditional_product_values(condprod):
        assert machine_value(condprod, parse_word("a a #2 #3", "nat"), 100) == nat("6")
        assert machine_value(condprod, parse_word("", "nat"), 10) == nat("1")
        assert machine_value(condprod, parse_word("a #2 #3", "nat"), 100) == nat("0")
        assert machine_value(condprod, parse_word("#2 a", "nat"), 100) == nat("0")

    @staticmethod
    def test_builder_matches_file(condprod):
        built = corpus.conditional_product_machine("nat")
        assert render_machine(built) == render_machine(condprod)

    @staticmethod
    def test_tropical_product():
        m = corpus.load_machine("condprod", "trop")
        got = machine_value(m, parse_word("a a #2 #5/2", "trop"), 100)
        assert got == parse_value("9/2", "trop")

    @staticmethod
    def test_identity_machine():
        m = corpus.load_machine("id", "nat")
        assert machine_value(m, parse_word("#5", "nat"), 2) == nat("5")
        assert machine_value(m, parse_word("a", "nat"), 2) == nat("1")

    @staticmethod
    def test_limited_recognition():
        s = get_semiring("nat")
        f = RecognitionFn(frozenset({s.one()}))
        assert rec_apply(f, nat("1")) == nat("1")
        assert rec_apply(f, nat("2")) == nat("3")
        m = corpus.load_machine("limrec", "nat")
        assert machine_value(m, parse_word("#0", "nat"), 1) == nat("1")

    @staticmethod
    def test_halting_configuration_is_worth_one():
        m = corpus.halting_machine("trop")
        assert machine_value(m, parse_word("a #3", "trop"), 0) == get_semiring("trop").one()

    @staticmethod
    def test_branching_sums_paths():
        m = corpus.branching_machine("nat")
        word = parse_word("#5", "nat")
        paths = enumerate_paths(m, word, 5)
        assert sorted(str(w) for _, w in paths) == ["2", "5"]
        assert machine_value(m, word, 5) == nat("7")

    @staticmethod
    @pytest.mark.parametrize("memoize", [True, False])
    def test_path_sum_matches(memoize):
        m = corpus.shuttle_machine("nat")
        for text in ("", "a", "#4", "#4 a", "a #3 #2"):
            word = parse_word(text, "nat")
            paths = enumerate_paths(m, word, 10)
            assert fold_add((w for _, w in paths), "nat") == machine_value(m, word, 10, memoize=memoize)

    @staticmethod
    def test_left_move_at_origin_reflects():
        m = corpus.shuttle_machine("nat")
        word = parse_word("#4", "nat")
        c = initial_configuration(m, word)
        c, _ = step(m, c, applicable_transitions(m, c)[0])
        assert c.head == 1
        c, _ = step(m, c, applicable_transitions(m, c)[0])
        assert c.head == 0 and c.state == "pick"
        assert machine_value(m, word, 3) == nat("4")

    @staticmethod
    def test_budget_exceeded(condprod):
        with pytest.raises(BudgetExceeded) as info:
            machine_value(condprod, parse_word("a #1", "nat"), 5)
        assert info.value.budget == 5

    @staticmethod
    def test_letter_outside_input_alphabet(condprod):
        with pytest.raises(LetterNotInInputAlphabet):
            machine_value(condprod, parse_word("b", "nat"), 10)

    @staticmethod
    def test_step_rejects_foreign_transition(condprod):
        c = initial_configuration(condprod, parse_word("a", "nat"))
        foreign = Transition("left", "a", "left", "a", -1, ConstWeight(nat("1")))
        with pytest.raises(NotApplicable):
            step(condprod, c, foreign)

    @staticmethod
    def test_invalid_machine_is_reported():
        text = (
            "states: init\ninput_alphabet: a\ntape_alphabet: a, X, _\ninit: init\n"
            "blank: _\nplaceholder: X\nknown: #1\ninit,a -> gone,a, +1, #7\n"
        )
        m = parse_machine(text, "nat")
        codes = {d.code for d in validate_machine(m)}
        assert codes == {DiagnosticCode.UNKNOWN_STATE, DiagnosticCode.UNKNOWN_CONSTANT_WEIGHT}
        with pytest.raises(InvalidMachine):
            machine_value(m, parse_word("a", "nat"), 3)

    @staticmethod
    def test_recognition_needs_oracle():
        m = corpus.limrec_machine({get_semiring("nat").one()})
        assert validate_machine(m) == []
        text = render_machine(m).replace("oracle: yes\n", "")
        codes = {d.code for d in validate_machine(parse_machine(text, "nat"))}
        assert DiagnosticCode.ORACLE_NOT_ENABLED in codes

    @staticmethod
    def test_unused_known_value_is_reported(caplog):
        identity = corpus.load_machine("id", "nat")
        m = replace(identity, known_values=identity.known_values | {nat("9")})
        assert unused_known_values(m) == [nat("9")]
        with caplog.at_level(logging.WARNING, logger=SIMULATOR_LOGGER):
            assert machine_value(m, parse_word("#5", "nat"), 2) == nat("5")
        assert [r.levelno for r in caplog.records if r.name == SIMULATOR_LOGGER] == [logging.WARNING]
        assert "known value #9 is not used" in caplog.text

    @staticmethod
    def test_used_known_values_stay_quiet(caplog):
        m = corpus.limrec_machine({nat("1"), nat("2")})
        assert unused_known_values(m) == []
        with caplog.at_level(logging.WARNING, logger=SIMULATOR_LOGGER):
            machine_value(m, parse_word("#2", "nat"), 1)
        assert not [r for r in caplog.records if r.name == SIMULATOR_LOGGER]


class TestSimulatorProperties:

    @staticmethod
    def test_zero_weight_never_raises_the_value(rng):
        zero = get_semiring("nat").zero()
        for _ in range(30):
            m = samples.random_layered_machine(rng, "nat")
            word = samples.random_word(rng, "nat", rng.randint(0, 3))
            before = machine_value(m, word, LAYERED_BUDGET)
            victim = rng.choice(sorted(m.transitions, key=Transition.serialize))
            zeroed = replace(victim, weight=ConstWeight(zero))
            after = machine_value(m.with_transitions(m.transitions - {victim} | {zeroed}), word, LAYERED_BUDGET)
            assert after.payload <= before.payload, victim.serialize()

    @staticmethod
    def test_annotations_survive_every_step(rng):
        for _ in range(30):
            m = samples.random_layered_machine(rng, "nat")
            word = samples.random_word(rng, "nat", rng.randint(0, 4))
            c = initial_configuration(m, word)
            annotations = c.annotations
            while applicable_transitions(m, c):
                c, _ = step(m, c, rng.choice(applicable_transitions(m, c)))
                assert c.annotations == annotations
                assert [c.annotation_at(i) for i in range(len(word.tokens))] == list(annotations)

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop", "lat5"])
    def test_repeated_evaluation_is_stable(rng, semiring):
        for _ in range(20):
            m = samples.random_layered_machine(rng, semiring)
            word = samples.random_word(rng, semiring, rng.randint(0, 3))
            first = machine_value(m, word, LAYERED_BUDGET)
            assert machine_value(m, word, LAYERED_BUDGET) == first
            assert machine_value(m, word, LAYERED_BUDGET, memoize=False) == first
