import random

import pytest

from srtmkit.errors import BoundTooSmall, FormatError, OracleTransitionsPresent
from srtmkit.models import wqbf as q
from srtmkit.models.semiring import get_semiring
from srtmkit.parsers.text_formats import parse_word
from srtmkit.services import corpus
from srtmkit.services.cook_levin import TimeSpaceBound, crosscheck_wqbf, machine_to_wqbf
from srtmkit.services.wqbf_solver import eval_wqbf_naive, substitute_surrogates

INPUTS = ["", "a", "#3", "a #2", "#4 #1"]


class TestTimeSpaceBound:

    @staticmethod
    def test_coefficients_ascend():
        p = TimeSpaceBound.parse("1,0,2")
        assert p.at(3) == 19
        assert list(p.cells(0)) == [0, 1]
        assert len(p.steps(1)) == 4

    @staticmethod
    def test_rejects_bad_bounds():
        with pytest.raises(FormatError):
            TimeSpaceBound.parse("0,1")
        with pytest.raises(FormatError):
            TimeSpaceBound.parse("1,x")


class TestCookLevin:

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop"])
    @pytest.mark.parametrize("name", sorted(corpus.small_machines()))
    def test_encoding_matches_simulator(name, semiring):
        m = corpus.small_machines(semiring)[name]
        for text in INPUTS:
            check = crosscheck_wqbf(m, parse_word(text, semiring), TimeSpaceBound.parse("3"))
            assert check.passed, (name, text, check.left_value, check.right_value)

    @staticmethod
    def test_variable_inventory():
        m = corpus.identity_machine()
        alpha, atlas = machine_to_wqbf(m, 1, TimeSpaceBound.parse("2"))
        assert q.is_sum_bf(alpha)
        assert len(atlas.variables()) == atlas.expected_count()
        assert q.bound_vars(alpha) == set(atlas.variables())
        assert {s.tag for s in q.surrogates(alpha)} >= {q.InputPosition(0)}
        assert set(atlas.named_values.values()) == set(m.known_values)

    @staticmethod
    def test_dropping_symbol_exclusion_breaks_a_case():
        m = corpus.branching_machine()
        p = TimeSpaceBound.parse("1")
        assert crosscheck_wqbf(m, parse_word("#5", "nat"), p).passed
        broken = [
            text for text in INPUTS
            if not crosscheck_wqbf(m, parse_word(text, "nat"), p, omit={5}).passed
        ]
        assert broken

    @staticmethod
    def test_bound_too_small(condprod):
        with pytest.raises(BoundTooSmall):
            machine_to_wqbf(condprod, 2, TimeSpaceBound.parse("2"), shape=parse_word("a #1", "nat"))

    @staticmethod
    def test_recognition_weights_are_refused():
        m = corpus.limrec_machine({get_semiring("nat").one()})
        with pytest.raises(OracleTransitionsPresent):
            machine_to_wqbf(m, 1, TimeSpaceBound.parse("2"))

    @staticmethod
    def test_shape_length_must_match():
        with pytest.raises(FormatError):
            machine_to_wqbf(corpus.identity_machine(), 2, TimeSpaceBound.parse("2"), shape=parse_word("a", "nat"))

    @staticmethod
    def test_unknown_subformula():
        with pytest.raises(FormatError):
            machine_to_wqbf(corpus.identity_machine(), 1, TimeSpaceBound.parse("2"), omit={13})


class TestEncodingAnnihilation:

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop"])
    def test_violated_subformula_zeroes_the_matrix(semiring):
        rng = random.Random(41)
        m = corpus.identity_machine(semiring)
        word = parse_word("#5", semiring)
        alpha, atlas = machine_to_wqbf(m, 1, TimeSpaceBound.parse("2"), shape=word)
        matrix = substitute_surrogates(alpha, word, atlas.named_values, semiring)
        while isinstance(matrix, q.SumVar):
            matrix = matrix.body
        zero = get_semiring(semiring).zero()
        variables = atlas.variables()
        for _ in range(100):
            interp = q.LiteralInterp.of({v: rng.random() < 0.5 for v in variables})
            assert eval_wqbf_naive(matrix, interp, semiring) == zero
            assert any(eval_wqbf_naive(part, interp, semiring) == zero for part in matrix.parts)
