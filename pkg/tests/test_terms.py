import pytest
from hypothesis import given, settings

from conftest import all_models, boolean_term_strategy, term_strategy
from dualtab.errors import NotBoolean, ParseError
from dualtab.semantics import eval_term
from dualtab.terms import (CMPL_ONE, Cmpl, Comp, Conv, Inter, ONE, Union, Var,
                           classify, components, fragment_check, is_boolean,
                           is_cnf, nf_cmpl, parse_term, render_term,
                           simplify_ones, term_size, term_variables)


class TestParse:
    def test_complement_of_composition(self):
        assert parse_term("-(r ; 1)") == Cmpl(Comp(Var("r"), ONE))

    def test_nested_composition(self):
        expected = Cmpl(Comp(Union(Var("r1"), Var("s")), Comp(Var("p"), ONE)))
        assert parse_term("-((r1 | s) ; (p ; 1))") == expected

    def test_incomplete_input_reports_offset(self):
        with pytest.raises(ParseError) as exc:
            parse_term("r &")
        assert exc.value.offset == 3
        assert exc.value.expected

    def test_trailing_input(self):
        with pytest.raises(ParseError):
            parse_term("r r")

    def test_unbalanced_paren(self):
        with pytest.raises(ParseError) as exc:
            parse_term("(r | s")
        assert ")" in exc.value.expected

    def test_precedence(self):
        # '-' over ';' over '&' over '|', left-assoc chains
        assert parse_term("-r ; s") == Comp(Cmpl(Var("r")), Var("s"))
        assert parse_term("r ; s & p | q") == Union(
            Inter(Comp(Var("r"), Var("s")), Var("p")), Var("q")
        )
        assert parse_term("r | s | p") == Union(Union(Var("r"), Var("s")), Var("p"))

    def test_converse_postfix(self):
        assert parse_term("r^") == Conv(Var("r"))
        assert parse_term("r^^") == Conv(Conv(Var("r")))
        assert parse_term("-r^") == Cmpl(Conv(Var("r")))
        assert parse_term("(r | s)^") == Conv(Union(Var("r"), Var("s")))

    def test_unicode_aliases(self):
        assert parse_term("r ∪ s") == Union(Var("r"), Var("s"))
        assert parse_term("r ∩ s") == Inter(Var("r"), Var("s"))
        assert parse_term("−r") == Cmpl(Var("r"))
        assert parse_term("r⌣") == Conv(Var("r"))


class TestRender:
    def test_variable(self):
        assert render_term(Var("r")) == "r"

    def test_union_with_constant(self):
        assert render_term(Union(ONE, Var("p"))) == "(1 | p)"

    def test_double_complement_of_constant(self):
        assert render_term(Cmpl(Cmpl(ONE))) == "-(-1)"

    @given(term_strategy())
    def test_round_trip(self, t):
        assert parse_term(render_term(t)) == t


class TestSimplifyOnes:
    def test_union_with_one(self):
        assert simplify_ones(parse_term("1 | p")) == ONE

    def test_intersection_with_complemented_one(self):
        assert simplify_ones(parse_term("-1 & p")) == CMPL_ONE

    def test_nested(self):
        t = parse_term("1 & (p | -1)")
        simplified = simplify_ones(t)
        assert simplified == Var("p")
        # independent check: the rewrite preserves meaning on every
        # two-element model
        for model in all_models(["p"], 2):
            assert eval_term(model, t) == eval_term(model, simplified)

    @given(term_strategy(with_conv=False))
    def test_idempotent(self, t):
        once = simplify_ones(t)
        assert simplify_ones(once) == once

    @given(term_strategy(with_conv=False))
    def test_boolean_subterms_normalized(self, t):
        # after simplification a Boolean subterm is 1, -1, or 1-free
        def subterms(u):
            yield u
            match u:
                case Cmpl(a) | Conv(a):
                    yield from subterms(a)
                case Union(l, r) | Inter(l, r) | Comp(l, r):
                    yield from subterms(l)
                    yield from subterms(r)
                case _:
                    pass

        simplified = simplify_ones(t)
        for sub in subterms(simplified):
            if is_boolean(sub) and sub not in (ONE, CMPL_ONE):
                assert not classify(sub).contains_one


class TestNfCmpl:
    def test_de_morgan_union(self):
        assert nf_cmpl(parse_term("-(q | p)")) == Inter(Cmpl(Var("q")), Cmpl(Var("p")))

    def test_double_complement(self):
        assert nf_cmpl(parse_term("--s")) == Var("s")

    def test_already_normal(self):
        t = parse_term("r | s")
        assert nf_cmpl(t) == t

    def test_rejects_composition(self):
        with pytest.raises(NotBoolean):
            nf_cmpl(parse_term("r ; s"))

    @given(boolean_term_strategy())
    def test_idempotent_and_normal(self, t):
        normal = nf_cmpl(t)
        assert nf_cmpl(normal) == normal
        assert is_cnf(normal)

    @given(boolean_term_strategy(variables=("p", "q"), max_leaves=6))
    @settings(max_examples=40)
    def test_preserves_meaning(self, t):
        normal = nf_cmpl(t)
        for model in all_models(term_variables(t), 2):
            assert eval_term(model, t) == eval_term(model, normal)


class TestComponents:
    def test_variable(self):
        assert components(Var("r")) == {Var("r")}

    def test_union(self):
        t = parse_term("r | s")
        assert components(t) == {t, Var("r"), Var("s")}

    def test_complemented_union(self):
        t = parse_term("-(r | s)")
        assert components(t) == {t, Cmpl(Var("r")), Cmpl(Var("s"))}

    def test_contains_term_itself(self):
        t = parse_term("1 ; (-(r ; (s ; 1)))")
        assert t in components(t)

    @given(term_strategy())
    def test_bounded_by_twice_the_size(self, t):
        assert len(components(t)) <= 2 * term_size(t)


class TestClassify:
    def test_plain_boolean(self):
        assert classify(parse_term("(r1 | s) & r2")).is_plain_boolean

    def test_complement_is_not_plain(self):
        c = classify(parse_term("-r"))
        assert not c.is_plain_boolean
        assert c.is_cnf

    def test_composition_with_one(self):
        c = classify(parse_term("p ; 1"))
        assert not c.is_plain_boolean
        assert c.contains_one

    @given(term_strategy())
    def test_plain_implies_cnf_and_one_free(self, t):
        c = classify(t)
        if c.is_plain_boolean:
            assert c.is_cnf
            assert not c.contains_one


class TestFragmentCheck:
    @pytest.mark.parametrize("text", [
        "-((r1 | s) ; (p ; 1))",
        "1 ; ((r1 | s) ; -((((q | p) & r1) ; 1)))",
        "1 ; (((r1 | s) & r2) ; 1)",
    ])
    def test_accepts(self, text):
        assert fragment_check(simplify_ones(parse_term(text)))

    def test_rejects_complemented_left_operand(self):
        verdict = fragment_check(parse_term("(-r) ; s"))
        assert not verdict
        assert verdict.offender == Cmpl(Var("r"))

    def test_rejects_converse(self):
        verdict = fragment_check(simplify_ones(parse_term("r^")))
        assert not verdict
        assert "converse" in verdict.clause

    def test_rejects_composition_as_left_operand(self):
        assert not fragment_check(parse_term("(r ; 1) ; s"))

    def test_rejects_misplaced_one_in_right_operand(self):
        assert not fragment_check(parse_term("r ; (1 ; s)"))
        assert not fragment_check(parse_term("r ; (s | 1)"))

    def test_accepts_inert_shapes(self):
        assert fragment_check(parse_term("-(1 ; 1)"))
        assert fragment_check(parse_term("1 ; 1"))

    def test_accepted_compositions_have_admissible_left(self):
        def comps(t):
            match t:
                case Comp(l, r):
                    yield t
                    yield from comps(l)
                    yield from comps(r)
                case Cmpl(a) | Conv(a):
                    yield from comps(a)
                case Union(l, r) | Inter(l, r):
                    yield from comps(l)
                    yield from comps(r)
                case _:
                    return

        for text in ["-((r1 | s) ; (p ; 1))",
                     "1 ; ((r1 | s) ; -((((q | p) & r1) ; 1)))"]:
            t = simplify_ones(parse_term(text))
            assert fragment_check(t)
            for comp in comps(t):
                assert comp.left == ONE or classify(comp.left).is_plain_boolean
