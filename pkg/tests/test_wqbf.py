import random

import pytest

from srtmkit.errors import FormulaSyntaxError, MixedSemirings, UnknownNamedSurrogate, UnresolvedSurrogate
from srtmkit.models import wqbf as q
from srtmkit.models.semiring import get_semiring, parse_value
from srtmkit.parsers.text_formats import parse_word
from srtmkit.parsers.wqbf_parser import parse_wqbf
from srtmkit.services import samples
from srtmkit.services.wqbf_solver import EvalStats, eval_wqbf_naive, eval_wqbf_pruned, substitute_surrogates

NAT_CASES = [
    ("sum x. (x + !x)", 2),
    ("prod x. (x + #2)", 6),
    ("sum x. sum y. (x * y)", 1),
    ("sum x. prod y. (x + y)", 2),
    ("prod x. sum y. (x + !y)", 3),
    ("#4", 4),
    ("x", 0),
]


def both(alpha, semiring):
    return eval_wqbf_naive(alpha, semiring=semiring), eval_wqbf_pruned(alpha, semiring)


class TestWqbf:

    @staticmethod
    @pytest.mark.parametrize("text, expected", NAT_CASES)
    def test_values(text, expected):
        alpha = parse_wqbf(text, "nat")
        naive, pruned = both(alpha, "nat")
        assert naive == pruned == parse_value(str(expected), "nat")

    @staticmethod
    def test_tropical():
        alpha = parse_wqbf("sum x. ((x * #3) + (!x * #5))", "trop")
        assert both(alpha, "trop") == (parse_value("3", "trop"),) * 2

    @staticmethod
    def test_shape_predicates():
        assert q.is_sum_bf(parse_wqbf("sum x. sum y. (x * y)", "nat"))
        assert not q.is_sum_bf(parse_wqbf("sum x. prod y. (x * y)", "nat"))
        assert not q.is_sum_bf(parse_wqbf("sum x. (x * y)", "nat"))
        assert q.free_vars(parse_wqbf("(x * sum y. y)", "nat")) == {"x"}
        assert q.is_fully_quantified(parse_wqbf("prod y. y", "nat"))

    @staticmethod
    def test_rendering_parses_back():
        for text, _ in NAT_CASES + [("sum x. ((x * surr@0) + (!x * surr:r1))", None)]:
            alpha = parse_wqbf(text, "nat")
            assert parse_wqbf(q.render_wqbf(alpha), "nat") == alpha

    @staticmethod
    def test_syntax_errors():
        for text in ("(x + y * z)", "(", "sum . x", "!(x)"):
            with pytest.raises(FormulaSyntaxError):
                parse_wqbf(text, "nat")

    @staticmethod
    def test_surrogates():
        alpha = parse_wqbf("sum x. ((x * surr@0) + (!x * surr:r0))", "nat")
        with pytest.raises(UnresolvedSurrogate):
            eval_wqbf_pruned(alpha, "nat")
        with pytest.raises(UnknownNamedSurrogate):
            substitute_surrogates(alpha, parse_word("#4", "nat"), {}, "nat")
        named = {"r0": parse_value("5", "nat")}
        closed = substitute_surrogates(alpha, parse_word("#4", "nat"), named, "nat")
        assert both(closed, "nat") == (parse_value("9", "nat"),) * 2
        on_letter = substitute_surrogates(alpha, parse_word("a", "nat"), named, "nat")
        assert eval_wqbf_pruned(on_letter, "nat") == parse_value("5", "nat")

    @staticmethod
    def test_semiring_needed_without_constants():
        with pytest.raises(MixedSemirings):
            eval_wqbf_pruned(parse_wqbf("sum x. x", "nat"))

    @staticmethod
    def test_annihilation_prunes():
        alpha = parse_wqbf("sum a. sum b. sum c. sum d. (a * !a * b * c * d)", "nat")
        naive, pruned = EvalStats(), EvalStats()
        assert eval_wqbf_naive(alpha, semiring="nat", stats=naive) == parse_value("0", "nat")
        assert eval_wqbf_pruned(alpha, "nat", pruned) == parse_value("0", "nat")
        assert naive.interpretations == 16
        assert pruned.interpretations == 2

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop", "bool", "lat5"])
    def test_pruned_agrees_with_naive(semiring):
        rng = random.Random(11)
        for _ in range(40):
            count = rng.randint(1, 7)
            alpha = samples.random_wqbf(rng, semiring, count)
            stats = EvalStats()
            naive, pruned = eval_wqbf_naive(alpha, semiring=semiring), eval_wqbf_pruned(alpha, semiring, stats)
            assert naive == pruned, q.render_wqbf(alpha)
            assert stats.interpretations <= 2 ** count

    @staticmethod
    @pytest.mark.parametrize("text, semiring, expected", [
        ("prod y. sum x. (y * #0)", "nat", "0"),
        ("sum y. (#2 * sum x. (y * #0))", "nat", "0"),
        ("sum y. (y * prod x. (#2 + (y * #0)))", "nat", "4"),
        ("prod y. sum x. (y * #inf)", "trop", "inf"),
        ("sum y. ((y * #3) + prod x. (#1 + (y * #inf)))", "trop", "2"),
    ])
    def test_inner_quantifier_closed_by_simplification(text, semiring, expected):
        alpha = parse_wqbf(text, semiring)
        assert both(alpha, semiring) == (parse_value(expected, semiring),) * 2

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop", "bool", "lat5"])
    def test_nested_quantifiers_agree(semiring):
        rng = random.Random(23)
        for _ in range(60):
            alpha = samples.random_nested_wqbf(rng, semiring, rng.randint(1, 7), depth=rng.randint(2, 5))
            assert not q.free_vars(alpha)
            naive_stats, pruned_stats = EvalStats(), EvalStats()
            naive = eval_wqbf_naive(alpha, semiring=semiring, stats=naive_stats)
            assert eval_wqbf_pruned(alpha, semiring, pruned_stats) == naive, q.render_wqbf(alpha)
            assert pruned_stats.interpretations <= naive_stats.interpretations

    @staticmethod
    @pytest.mark.parametrize("semiring", ["nat", "trop", "lat5"])
    def test_constant_factors_distribute_over_sums(semiring):
        rng = random.Random(29)
        s = get_semiring(semiring)
        for _ in range(40):
            inner = samples.random_wqbf(rng, semiring, rng.randint(1, 5))
            k = q.Const(s.sample(rng))
            lhs = q.SumVar(inner.var, q.Times((inner.body, k)))
            rhs = q.Times((q.SumVar(inner.var, inner.body), k))
            assert both(lhs, semiring) == both(rhs, semiring), q.render_wqbf(lhs)


class TestLiteralInterp:

    @staticmethod
    def test_updates_replace_the_polarity():
        rng = random.Random(31)
        names = ["a", "b", "c", "d"]
        for _ in range(100):
            interp = q.LiteralInterp.of({v: rng.random() < 0.5 for v in rng.sample(names, rng.randint(0, 4))})
            var = rng.choice(names)
            assert interp.with_pos(var).with_neg(var) == interp.with_neg(var)
            assert interp.with_neg(var).with_pos(var) == interp.with_pos(var)
            for updated in (interp.with_pos(var), interp.with_neg(var)):
                assert updated.is_consistent()
                assert all(not (updated.holds(v, True) and updated.holds(v, False)) for v in names)
                assert updated.holds(var, True) != updated.holds(var, False)
            other = [v for v in names if v != var]
            for v in other:
                assert interp.with_pos(var).holds(v, True) == interp.holds(v, True)
