import pytest

from srtmkit.errors import ArityMismatch, FormulaSyntaxError, UnknownSymbol
from srtmkit.models import formulas as f
from srtmkit.parsers.formula_parser import parse_formula
from srtmkit.services import corpus


def parse(text, sig, semiring="nat", free_sets=None):
    return parse_formula(text, sig, semiring, free_sets)


class TestFormulaParser:

    @staticmethod
    def test_atoms_resolve_against_signature(unary_sig):
        phi = parse("sum x. (R(x) * W(x))", unary_sig)
        assert phi == f.SumFO("x", f.Times((f.RAtom("R", ("x",)), f.WAtom("W", ("x",)))))

    @staticmethod
    def test_set_variables_shadow_nothing(unary_sig):
        phi = parse("sumset X/1. sum x. (X(x) * W(x))", unary_sig)
        assert phi.body.body.parts[0] == f.XAtom("X", ("x",))
        free = parse("(X(y) * W(y))", unary_sig, free_sets={"X": 1})
        assert free.parts[0] == f.XAtom("X", ("y",))

    @staticmethod
    def test_sugar_is_lowered(unary_sig):
        assert parse("x = y", unary_sig) == f.equals("x", "y")
        assert parse("forall x. R(x)", unary_sig) == f.Not(f.ExistsFO("x", f.Not(f.RAtom("R", ("x",)))))
        assert parse("(R(x) -> R(y))", unary_sig) == f.implies(f.RAtom("R", ("x",)), f.RAtom("R", ("y",)))

    @staticmethod
    def test_argument_lists():
        graph = corpus.load_signature("graph")
        assert parse("E(x, y)", graph) == f.WAtom("E", ("x", "y"))
        assert parse("sum x. sum y. E(y,x)", graph).body.body == f.WAtom("E", ("y", "x"))
        with pytest.raises(FormulaSyntaxError):
            parse("E(x,)", graph)

    @staticmethod
    def test_syntax_errors(unary_sig):
        for text in ("bad(", "sum x W(x)", "(R(x) or R(y) and R(x))", "not W(x)", "exists x. W(x)",
                     "sumset X/0. #1"):
            with pytest.raises(FormulaSyntaxError):
                parse(text, unary_sig)

    @staticmethod
    def test_symbol_errors(unary_sig):
        with pytest.raises(UnknownSymbol):
            parse("Q(x)", unary_sig)
        with pytest.raises(ArityMismatch):
            parse("R(x,y)", unary_sig)
        with pytest.raises(ArityMismatch):
            parse("sumset X/2. sum x. X(x)", unary_sig)


class TestFormulaShape:

    @staticmethod
    @pytest.mark.parametrize("text, fragment", [
        ("exists x. R(x)", f.Fragment.FO),
        ("existsset X/1. exists x. X(x)", f.Fragment.SO),
        ("sum x. W(x)", f.Fragment.WFO),
        ("sumset X/1. sum x. (X(x) * W(x))", f.Fragment.WESO),
        ("(existsset X/1. exists x. X(x) * #2)", f.Fragment.WESO),
        ("(not existsset X/1. exists x. X(x) * #2)", f.Fragment.WSO),
        ("prodset X/1. #1", f.Fragment.WSO),
    ])
    def test_classify(unary_sig, text, fragment):
        assert f.classify(parse(text, unary_sig)) == fragment

    @staticmethod
    def test_free_variables(unary_sig):
        phi = parse("sum x. ((x <= y) * W(x))", unary_sig)
        assert f.free_vars(phi) == {"y"}
        fo, so = f.free_split(parse("(X(y) * W(z))", unary_sig, free_sets={"X": 1}))
        assert fo == {"y", "z"} and so == {"X"}

    @staticmethod
    def test_rendering_parses_back(unary_sig):
        for phi in corpus.load_formulas("capture", unary_sig, "nat"):
            assert parse(f.render(phi), unary_sig) == phi
