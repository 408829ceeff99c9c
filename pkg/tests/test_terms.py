from fractions import Fraction as F

import pytest

from pcka.automata import ActionAlphabet, reachable, skip
from pcka.laws import random_terms
from pcka.simulation import equiv
from pcka.terms import (Act, One, Par, PChoice, Plus, Run, Seq, Star, TermSyntaxError, Zero,
                        compile_term, least_fixpoint_star, parse, parse_term,
                        parse_term_file, pretty, term_actions)
from pcka.textio import load_automaton
from pcka.rg import _data

VEND = ActionAlphabet(["coin", "kick", "tea", "fail"], ["stuck"])
AB = ActionAlphabet("abc")


def test_user_term():
    t = parse_term("coin . (kick . (kick . fail* + tea) + tea)", VEND)
    kick, tea, fail = Act("kick"), Act("tea"), Act("fail")
    assert t == Seq(Act("coin"), Plus(Seq(kick, Plus(Seq(kick, Star(fail)), tea)), tea))


def test_m_term():
    t = parse_term("(stuck . kick +[1/5] tea . 0)* . 0", VEND)
    body = PChoice(Seq(Act("stuck"), Act("kick")), F(1, 5), Seq(Act("tea"), Zero()))
    assert t == Seq(Star(body), Zero())
    assert least_fixpoint_star(body) == t


def test_precedence():
    assert parse_term("a . b*") == Seq(Act("a"), Star(Act("b")))
    assert parse_term("a + b . c") == Plus(Act("a"), Seq(Act("b"), Act("c")))
    assert parse_term("a ||{a} b . c") == Par(Act("a"), frozenset("a"), Seq(Act("b"), Act("c")))
    assert parse_term("a + b ||{} c") == Plus(Act("a"), Par(Act("b"), frozenset(), Act("c")))
    assert parse_term("run{b,a}") == Run(frozenset("ab"))


@pytest.mark.parametrize("text", ["a + b +[1/2] c", "a +[1/2] b + c", "a . ", "(a", "2",
                                  "a +[3/2] b", "a +[1/0] b", "run{}"])
def test_syntax_errors(text):
    with pytest.raises(TermSyntaxError):
        parse_term(text, AB)


def test_decimal_probability_is_exact():
    assert parse_term("a +[0.04] b") == PChoice(Act("a"), F(1, 25), Act("b"))


def test_error_positions():
    with pytest.raises(TermSyntaxError) as e:
        parse_term("a . zz", AB)
    assert (e.value.line, e.value.col) == (1, 5)
    with pytest.raises(TermSyntaxError) as e:
        parse("external a\ndef X = a +\n")
    assert e.value.line == 2


def test_undeclared_frame_action():
    with pytest.raises(TermSyntaxError):
        parse_term("a ||{d} b", AB)
    with pytest.raises(TermSyntaxError):
        parse_term("a ||{i} b", ActionAlphabet("ab", ["i"]))


def test_term_file():
    alphabet, defs = parse(_data("vending.terms"))
    assert alphabet == VEND
    assert list(defs) == ["M", "H", "U1", "Q1", "V", "U", "Q"]
    tf = parse_term_file("external a\nfoo x y\ndef X = a\n", ["foo"])
    assert tf.extra == [(2, "foo", "x y")]


def test_pretty():
    assert pretty(Zero()) == "0"
    assert pretty(Seq(Plus(Act("a"), One()), Act("b"))) == "(a + 1) . b"
    assert pretty(Seq(Act("a"), Seq(Act("b"), Act("c")))) == "a . (b . c)"
    assert pretty(Plus(PChoice(Act("a"), F(1, 2), Act("b")), Act("c"))) == "(a +[1/2] b) + c"
    assert pretty(Star(Star(Act("a")))) == "a**"


def test_round_trip_random():
    terms = random_terms(1, 500, 3)
    assert len(terms) == 500
    for t in terms:
        assert parse_term(pretty(t), AB) == t, pretty(t)


def test_compile_basics():
    one = compile_term(One(), AB)
    s = skip(AB)
    assert (len(one.states), len(one.transitions), len(one.finals)) == (1, 0, 1)
    assert equiv(one, s).verified
    a = Act("a")
    assert equiv(compile_term(Par(a, frozenset("a"), a), AB), compile_term(a, AB)).verified


@pytest.mark.parametrize("name,fig", [("M", "fig2_M.aut"), ("H", "fig2_H.aut"),
                                      ("V", "fig1_V.aut"), ("U", "fig1_U.aut"),
                                      ("Q", "fig3_Q.aut")])
def test_compiled_terms_match_figures(name, fig):
    alphabet, defs = parse(_data("vending.terms"))
    assert equiv(compile_term(defs[name], alphabet), load_automaton(_data(fig))).verified


def test_star_fixpoint():
    body = parse_term("stuck . kick +[1/5] tea . 0", VEND)
    lfp = least_fixpoint_star(body)
    unfolded = Seq(body, lfp)
    assert equiv(compile_term(unfolded, VEND), compile_term(lfp, VEND)).verified
    assert equiv(compile_term(least_fixpoint_star(One()), AB), compile_term(Zero(), AB)).verified


def test_term_actions():
    assert term_actions(parse_term("a . run{b} ||{a} c*")) == {"a", "b", "c"}
    assert len(reachable(compile_term(Zero(), AB)).states) == 1
