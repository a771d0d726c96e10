import pytest

from srtmkit.errors import FormatError, SignatureMismatch, TooLarge
from srtmkit.models.machine import Letter, Weight
from srtmkit.models.semiring import parse_value
from srtmkit.models.structure import (
    OrderedStructure,
    RelationValue,
    Signature,
    encode_structure,
    enumerate_relations_lex,
    enumerate_tuples_lex,
    iter_relations_lex,
    validate_structure,
)
from srtmkit.parsers.text_formats import (
    parse_assignment,
    parse_budget,
    parse_signature,
    parse_structure,
    render_signature,
    render_structure,
)
from srtmkit.schemas.models import DiagnosticCode
from srtmkit.services import corpus, samples


class TestStructure:

    @staticmethod
    def test_tuples_in_lexicographic_order():
        assert enumerate_tuples_lex(2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    @staticmethod
    def test_relations_from_empty_to_full():
        rels = enumerate_relations_lex(2, 1)
        assert rels == [frozenset(), {(1,)}, {(0,)}, {(0,), (1,)}]

    @staticmethod
    def test_second_order_cap():
        with pytest.raises(TooLarge):
            next(iter_relations_lex(5, 2, cap=24))

    @staticmethod
    def test_encoding(unary_sig, unary2):
        word = encode_structure(unary2, unary_sig)
        nat = lambda t: parse_value(t, "nat")
        assert word.tokens == (
            Letter("0"), Letter("0"), Letter("1"),
            Letter("0"), Letter("1"),
            Weight(nat("2")), Weight(nat("3")),
        )

    @staticmethod
    def test_encoding_with_free_values(unary_sig, unary2):
        word = encode_structure(unary2, unary_sig, [1, RelationValue(1, frozenset({(0,)}))])
        assert word.render().split()[-4:] == ["0", "1", "1", "0"]
        with pytest.raises(SignatureMismatch):
            encode_structure(unary2, unary_sig, [2])

    @staticmethod
    def test_signature_text(unary_sig):
        assert unary_sig == Signature((("R", 1),), (("W", 1),))
        assert parse_signature(render_signature(unary_sig)) == unary_sig
        with pytest.raises(FormatError):
            parse_signature("rel R")

    @staticmethod
    def test_structure_text(unary_sig, unary2):
        again, sig = parse_structure(render_structure(unary2, unary_sig), "nat")
        assert sig == unary_sig
        assert again.bool_rels == unary2.bool_rels
        assert again.weighted_rels == unary2.weighted_rels

    @staticmethod
    def test_weighted_relations_must_be_total():
        with pytest.raises(FormatError, match="PartialWeightedRelation"):
            parse_structure("size: 2\nwrel W/1: (0)=#2\n", "nat")
        with pytest.raises(FormatError, match="TupleOutOfRange"):
            parse_structure("size: 2\nrel R/1: (2)\n", "nat")
        with pytest.raises(FormatError):
            parse_structure("rel R/1: (0)\n", "nat")

    @staticmethod
    def test_diagnostics():
        sig = Signature((("R", 1),), (("R", 1),))
        a = OrderedStructure(size=0, semiring="nat")
        codes = {d.code for d in validate_structure(a, sig)}
        assert DiagnosticCode.EMPTY_UNIVERSE in codes
        assert DiagnosticCode.OVERLAPPING_NAMES in codes
        assert DiagnosticCode.MISSING_RELATION in codes

    @staticmethod
    def test_provenance_structure():
        structure, sig = corpus.load_structure("triangle", "poly")
        assert structure.size == 3 and sig.weighted_relations == (("E", 2),)
        assert str(structure.weight("E", (0, 1))) == "p"

    @staticmethod
    def test_assignment_text():
        rho = parse_assignment("x=1, X={(0),(1)}")
        assert rho["x"] == 1
        assert rho["X"] == RelationValue(1, frozenset({(0,), (1,)}))
        with pytest.raises(FormatError):
            parse_assignment("x=")

    @staticmethod
    def test_budgets():
        assert parse_budget("40")(7) == 40
        assert parse_budget("2*n**2+5")(3) == 23
        assert parse_budget("n^2")(4) == 16
        with pytest.raises(FormatError):
            parse_budget("m+1")
        with pytest.raises(FormatError):
            parse_budget("n-3")
        with pytest.raises(FormatError):
            parse_budget("²")


def random_signature(rng):
    bools = tuple((f"R{i}", rng.randint(1, 3)) for i in range(rng.randint(0, 2)))
    weighted = tuple((f"W{i}", rng.randint(1, 2)) for i in range(rng.randint(0, 2)))
    return Signature(bool_relations=bools, weighted_relations=weighted)


class TestEncodingShape:

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop", "lat5"])
    def test_length_and_weight_positions(rng, semiring):
        for _ in range(50):
            sig = random_signature(rng)
            n = rng.randint(1, 4)
            a = samples.random_structure(rng, n, sig, semiring)
            free = []
            for _ in range(rng.randint(0, 2)):
                if rng.random() < 0.5:
                    free.append(rng.randrange(n))
                else:
                    k = rng.randint(1, 2)
                    chosen = frozenset(t for t in enumerate_tuples_lex(n, k) if rng.random() < 0.5)
                    free.append(RelationValue(k, chosen))
            word = encode_structure(a, sig, free)
            head = n + 1 + sum(n ** k for _, k in sig.bool_relations)
            weights = sum(n ** k for _, k in sig.weighted_relations)
            tail = sum(n if isinstance(v, int) else n ** v.arity for v in free)
            assert len(word.tokens) == head + weights + tail
            assert sum(isinstance(t, Weight) for t in word.tokens) == weights
            assert all(isinstance(t, Weight) for t in word.tokens[head:head + weights])
            assert word.tokens[:n + 1] == (Letter("0"),) * n + (Letter("1"),)
            letters = word.tokens[:head] + word.tokens[head + weights:]
            assert {t.symbol for t in letters} <= {"0", "1"}
