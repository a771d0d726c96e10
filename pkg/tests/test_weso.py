import pytest

from srtmkit.errors import AlphabetMismatch, ArityTooSmall, OracleTransitionsPresent, SignatureMismatch
from srtmkit.models import formulas as f
from srtmkit.models.machine import Machine
from srtmkit.models.semiring import get_semiring
from srtmkit.models.structure import OrderedStructure, Signature
from srtmkit.parsers.formula_parser import parse_formula
from srtmkit.services import corpus
from srtmkit.services.evaluator import Evaluator
from srtmkit.services.weso_emitter import crosscheck_weso, emit_weso, machine_to_weso


def stopped_machine(semiring="nat"):
    """Over the encoding alphabet, with no transitions."""
    return Machine(
        semiring=semiring,
        known_values=frozenset({get_semiring(semiring).one()}),
        states=frozenset({"init"}),
        input_alphabet=frozenset({"0", "1"}),
        tape_alphabet=frozenset({"0", "1", "X", "_"}),
        initial_state="init",
        blank="_",
        placeholder="X",
        transitions=frozenset(),
    )


class TestWesoEmitter:

    @staticmethod
    @pytest.mark.parametrize("name", sorted(corpus.encoding_machines()))
    def test_sentence_shape(name, unary_sig):
        m = corpus.encoding_machines()[name]
        emission = emit_weso(m, 2, unary_sig)
        assert f.free_vars(emission.sentence) == frozenset()
        assert f.classify(emission.sentence) == f.Fragment.WESO
        assert all(f.is_bool(part) for part in emission.psi)
        placed = emission.constant_transitions + emission.cell_transitions
        assert sorted(placed, key=lambda t: t.serialize()) == sorted(m.transitions, key=lambda t: t.serialize())
        assert len(set(placed)) == len(placed)

    @staticmethod
    def test_sentence_parses_back(empty_sig):
        sentence = machine_to_weso(corpus.one_step_machine(), 1, empty_sig)
        assert parse_formula(f.render(sentence), empty_sig, "nat") == sentence

    @staticmethod
    def test_padding_covers_halting_pairs(empty_sig):
        emission = emit_weso(corpus.one_step_machine(), 1, empty_sig)
        assert sorted(emission.padding) == [("fin", s) for s in sorted(("0", "1", "X", "_"))]

    @staticmethod
    def test_single_element_structure(empty_sig):
        structure = OrderedStructure(size=1, semiring="nat")
        sentence = machine_to_weso(corpus.one_step_machine(), 1, empty_sig)
        assert Evaluator(structure).eval_weighted(sentence) == get_semiring("nat").one()
        check = crosscheck_weso(stopped_machine(), 1, structure, empty_sig)
        assert check.passed, (check.left_value, check.right_value)

    @staticmethod
    def test_refusals(unary_sig, empty_sig):
        with pytest.raises(OracleTransitionsPresent):
            emit_weso(corpus.limrec_machine({get_semiring("nat").one()}), 1, empty_sig)
        with pytest.raises(AlphabetMismatch):
            emit_weso(corpus.identity_machine(), 1, empty_sig)
        with pytest.raises(ArityTooSmall):
            emit_weso(corpus.one_step_machine(), 1, unary_sig)
        with pytest.raises(ArityTooSmall):
            emit_weso(corpus.one_step_machine(), 0, empty_sig)
        with pytest.raises(SignatureMismatch):
            emit_weso(corpus.one_step_machine(), 2, Signature((("Tape", 1),)))

    @staticmethod
    @pytest.mark.slow
    def test_formula_matches_machine(empty_sig):
        structure = OrderedStructure(size=2, semiring="nat")
        check = crosscheck_weso(corpus.one_step_machine(), 1, structure, empty_sig)
        assert check.passed, (check.left_value, check.right_value)
        assert check.right_value == "2"
