import random

import pytest

from srtmkit.errors import FormatError
from srtmkit.models.semiring import fold_add, parse_value
from srtmkit.parsers.text_formats import parse_word, render_machine
from srtmkit.services import corpus, samples
from srtmkit.services.simulator import enumerate_paths, machine_value, require_valid

PRODUCT_BUDGET = 200


class TestCorpus:

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop", "poly"])
    def test_builders_are_valid(semiring):
        machines = dict(corpus.small_machines(semiring))
        machines.update(corpus.encoding_machines(semiring))
        machines["condprod"] = corpus.conditional_product_machine(semiring)
        for m in machines.values():
            require_valid(m)

    @staticmethod
    def test_shipped_machines_load():
        machines = corpus.load_machines("nat")
        assert set(machines) == {"condprod", "id", "limrec"}
        assert render_machine(machines["condprod"]) == render_machine(corpus.conditional_product_machine("nat"))

    @staticmethod
    def test_closed_form():
        assert corpus.conditional_product(parse_word("a a #2 #3", "nat")) == parse_value("6", "nat")
        assert corpus.conditional_product(parse_word("", "nat")) == parse_value("1", "nat")
        assert corpus.conditional_product(parse_word("#2 a", "nat")) == parse_value("0", "nat")
        assert corpus.conditional_product(parse_word("a #2", "trop"), "trop") == parse_value("2", "trop")

    @staticmethod
    def test_machine_meets_closed_form(rng):
        m = corpus.conditional_product_machine("nat")
        for _ in range(20):
            for word in (samples.well_formed_product_input(rng, "nat"), samples.malformed_product_input(rng, "nat")):
                assert machine_value(m, word, PRODUCT_BUDGET) == corpus.conditional_product(word), word.render()

    @staticmethod
    def test_missing_file():
        with pytest.raises(FormatError):
            corpus.load_machine("nope")
        with pytest.raises(FormatError):
            corpus.load_structure("nope")


class TestSamples:

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop", "lat5"])
    def test_layered_machines_halt(semiring):
        rng = random.Random(7)
        for _ in range(15):
            m = samples.random_layered_machine(rng, semiring)
            require_valid(m)
            word = samples.random_word(rng, semiring, rng.randint(0, 3))
            total = fold_add((w for _, w in enumerate_paths(m, word, 4)), m.semiring)
            assert total == machine_value(m, word, 4)

    @staticmethod
    def test_malformed_inputs_are_malformed(rng):
        for _ in range(20):
            assert not corpus.is_conditional_product_input(samples.malformed_product_input(rng, "nat"))
            assert corpus.is_conditional_product_input(samples.well_formed_product_input(rng, "nat"))
