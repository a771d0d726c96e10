import random

import pytest

from srtmkit.errors import MixedSemirings, SignatureMismatch, TooLarge
from srtmkit.models import formulas as f
from srtmkit.models.semiring import get_semiring, parse_value
from srtmkit.models.structure import Assignment, RelationValue, Signature
from srtmkit.parsers.formula_parser import parse_formula
from srtmkit.services import corpus, samples
from srtmkit.services.evaluator import Evaluator, eval_bool, eval_weighted

# values of corpus/capture.wfo on corpus/unary2.struct (n = 2, R = {1}, W = 2, 3) over the naturals
CAPTURE_VALUES = [3, 5, 6, 3, 25, 2, 4, 10, 7, 12, 2, 5, 2, 2, 8, 10, 6, 30, 3, 2]


def nat(n):
    return parse_value(str(n), "nat")


class TestEvaluator:

    @staticmethod
    def test_capture_corpus(unary_sig, unary2):
        formulas = corpus.load_formulas("capture", unary_sig, "nat")
        assert len(formulas) == len(CAPTURE_VALUES)
        evaluator = Evaluator(unary2)
        for phi, expected in zip(formulas, CAPTURE_VALUES):
            assert evaluator.eval_weighted(phi) == nat(expected)

    @staticmethod
    def test_boolean_layer(unary_sig, unary2):
        assert eval_bool(unary2, None, parse_formula("exists x. R(x)", unary_sig, "nat"))
        assert not eval_bool(unary2, None, parse_formula("forall x. R(x)", unary_sig, "nat"))
        beta = parse_formula("existsset X/1. forall x. (X(x) <-> not R(x))", unary_sig, "nat")
        assert eval_bool(unary2, None, beta)

    @staticmethod
    def test_free_variables(unary_sig, unary2):
        phi = parse_formula("W(x)", unary_sig, "nat")
        assert eval_weighted(unary2, Assignment({"x": 1}), phi) == nat(3)
        psi = parse_formula("sum y. (X(y) * W(y))", unary_sig, "nat", {"X": 1})
        rho = Assignment(second_order={"X": RelationValue(1, frozenset({(0,)}))})
        assert eval_weighted(unary2, rho, psi) == nat(2)
        with pytest.raises(SignatureMismatch):
            eval_weighted(unary2, Assignment({"x": 5}), phi)

    @staticmethod
    def test_tropical_reading():
        structure, sig = corpus.load_structure("unary2", "trop")
        evaluator = Evaluator(structure)
        assert evaluator.eval_weighted(parse_formula("sum x. W(x)", sig, "trop")) == parse_value("2", "trop")
        assert evaluator.eval_weighted(parse_formula("prod x. W(x)", sig, "trop")) == parse_value("5", "trop")
        assert evaluator.eval_weighted(parse_formula("sum x. R(x)", sig, "trop")) == parse_value("0", "trop")

    @staticmethod
    def test_provenance_of_a_join():
        structure, sig = corpus.load_structure("triangle", "poly")
        phi = parse_formula("sum x. sum y. (E(x,y) * E(y,x))", sig, "poly")
        assert eval_weighted(structure, None, phi) == parse_value("2*p*q", "poly")
        cycle = parse_formula("sum x. sum y. sum z. (E(x,y) * E(y,z) * E(z,x))", sig, "poly")
        assert eval_weighted(structure, None, cycle) == parse_value("3*p*r*s", "poly")

    @staticmethod
    def test_products_ignore_enumeration_order(unary_sig, unary2):
        formulas = corpus.load_formulas("capture", unary_sig, "nat")
        expected = [Evaluator(unary2).eval_weighted(phi) for phi in formulas]
        for seed in range(5):
            shuffled = Evaluator(unary2, permute=random.Random(seed))
            assert [shuffled.eval_weighted(phi) for phi in formulas] == expected

    @staticmethod
    def test_set_sum_cuts_false_guards(unary_sig, unary2):
        phi = parse_formula("sumset X/1. (forall x. (X(x) or not R(x)) * #1)", unary_sig, "nat")
        evaluator = Evaluator(unary2)
        assert evaluator.eval_weighted(phi) == nat(2)
        assert evaluator.so_leaves == 2

    @staticmethod
    def test_semiring_must_match(unary2):
        with pytest.raises(MixedSemirings):
            Evaluator(unary2, "trop")

    @staticmethod
    def test_second_order_cap(unary_sig, unary2):
        phi = parse_formula("sumset X/1. #1", unary_sig, "nat")
        with pytest.raises(TooLarge):
            Evaluator(unary2, so_cap=1).eval_weighted(phi)


# --- brute-force reference over the first-order fragment ---

MIXED_SIG = Signature(bool_relations=(("R", 1), ("E", 2)), weighted_relations=(("W", 1), ("V", 2)))
NAMES = ("x", "y", "z")


def random_bool(rng, scope, depth):
    if depth == 0 or rng.random() < 0.3:
        if not scope:
            return f.ExistsFO("x", f.RAtom("R", ("x",)))
        roll = rng.random()
        if roll < 0.3:
            return f.Leq(rng.choice(scope), rng.choice(scope))
        if roll < 0.6:
            return f.RAtom("R", (rng.choice(scope),))
        return f.RAtom("E", (rng.choice(scope), rng.choice(scope)))
    roll = rng.random()
    if roll < 0.25:
        return f.Not(random_bool(rng, scope, depth - 1))
    if roll < 0.6:
        return f.Or((random_bool(rng, scope, depth - 1), random_bool(rng, scope, depth - 1)))
    var = rng.choice(NAMES)
    return f.ExistsFO(var, random_bool(rng, sorted(set(scope) | {var}), depth - 1))


def random_weighted(rng, s, scope, depth):
    if depth == 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.3 or not scope:
            return f.Const(s.sample(rng))
        if roll < 0.55:
            return f.WAtom("W", (rng.choice(scope),))
        if roll < 0.75:
            return f.WAtom("V", (rng.choice(scope), rng.choice(scope)))
        return random_bool(rng, scope, 1)
    roll = rng.random()
    if roll < 0.2:
        return f.Plus((random_weighted(rng, s, scope, depth - 1), random_weighted(rng, s, scope, depth - 1)))
    if roll < 0.4:
        return f.Times((random_weighted(rng, s, scope, depth - 1), random_weighted(rng, s, scope, depth - 1)))
    if roll < 0.5:
        return f.Times((random_bool(rng, scope, 1), random_weighted(rng, s, scope, depth - 1)))
    var = rng.choice(NAMES)
    kind = f.SumFO if roll < 0.85 else f.ProdFO
    return kind(var, random_weighted(rng, s, sorted(set(scope) | {var}), depth - 1))


def truth(beta, a, env):
    if isinstance(beta, f.Leq):
        return env[beta.left] <= env[beta.right]
    if isinstance(beta, f.RAtom):
        return tuple(env[v] for v in beta.args) in a.bool_rels[beta.name]
    if isinstance(beta, f.Not):
        return not truth(beta.body, a, env)
    if isinstance(beta, f.Or):
        return any(truth(p, a, env) for p in beta.parts)
    if isinstance(beta, f.ExistsFO):
        return any(truth(beta.body, a, {**env, beta.var: e}) for e in range(a.size))
    raise AssertionError(beta)


def brute_value(phi, a, env, s):
    if f.is_bool(phi):
        return s.one() if truth(phi, a, env) else s.zero()
    if isinstance(phi, f.Const):
        return phi.value
    if isinstance(phi, f.WAtom):
        return a.weighted_rels[phi.name][tuple(env[v] for v in phi.args)]
    if isinstance(phi, (f.Plus, f.SumFO)):
        if isinstance(phi, f.Plus):
            values = [brute_value(p, a, env, s) for p in phi.parts]
        else:
            values = [brute_value(phi.body, a, {**env, phi.var: e}, s) for e in range(a.size)]
        out = s.zero()
        for v in values:
            out = s.add(out, v)
        return out
    if isinstance(phi, (f.Times, f.ProdFO)):
        if isinstance(phi, f.Times):
            values = [brute_value(p, a, env, s) for p in phi.parts]
        else:
            values = [brute_value(phi.body, a, {**env, phi.var: e}, s) for e in range(a.size)]
        out = s.one()
        for v in values:
            out = s.mul(out, v)
        return out
    raise AssertionError(phi)


class TestEvaluatorProperties:

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop", "lat5"])
    def test_matches_brute_force(rng, semiring):
        s = get_semiring(semiring)
        for _ in range(60):
            a = samples.random_structure(rng, rng.randint(1, 4), MIXED_SIG, semiring)
            phi = random_weighted(rng, s, [], rng.randint(1, 4))
            assert eval_weighted(a, None, phi) == brute_value(phi, a, {}, s), f.render(phi)

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop"])
    def test_boolean_formulas_denote_zero_or_one(rng, semiring):
        s = get_semiring(semiring)
        for _ in range(60):
            a = samples.random_structure(rng, rng.randint(1, 4), MIXED_SIG, semiring)
            beta = random_bool(rng, [], rng.randint(1, 4))
            value = eval_weighted(a, None, beta)
            assert value in (s.zero(), s.one())
            assert (value == s.one()) == eval_bool(a, None, beta) == truth(beta, a, {})

    @staticmethod
    def test_constant_bodies_scale_with_the_universe(rng):
        s = get_semiring("nat")
        for n in range(1, 5):
            a = samples.random_structure(rng, n, MIXED_SIG, "nat")
            for _ in range(5):
                r = random_weighted(rng, s, [], 2)
                payload = eval_weighted(a, None, r).payload
                assert eval_weighted(a, None, f.SumFO("w", r)) == nat(n * payload)
                assert eval_weighted(a, None, f.ProdFO("w", r)) == nat(payload ** n)

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop"])
    def test_guards_select_or_annihilate(rng, semiring):
        s = get_semiring(semiring)
        for _ in range(60):
            a = samples.random_structure(rng, rng.randint(1, 4), MIXED_SIG, semiring)
            beta = random_bool(rng, [], 2)
            phi = random_weighted(rng, s, [], 2)
            guarded = eval_weighted(a, None, f.Times((beta, phi)))
            assert guarded == (eval_weighted(a, None, phi) if eval_bool(a, None, beta) else s.zero())
