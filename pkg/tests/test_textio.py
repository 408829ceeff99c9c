import pytest

from pcka.automata import ActionAlphabet, skip
from pcka.laws import DEFAULT_ALPHABET, random_terms
from pcka.rg import _data
from pcka.simulation import equiv, find_simulation
from pcka.terms import compile_term
from pcka.textio import (FormatError, dump_automaton, dump_relation, load_automaton,
                         load_relation, state_labels)


def test_load_fig2():
    m = load_automaton(_data("fig2_M.aut"))
    assert m.name == "M" and len(m.states) == 4 and len(m.transitions) == 3
    assert m.alphabet == ActionAlphabet(["coin", "kick", "tea", "fail"], ["stuck"])
    assert sorted(str(w) for w in m.initial.values()) == ["1/5", "4/5"]


def test_dump_load_is_stable():
    text = _data("fig2_H.aut")
    h = load_automaton(text)
    again = dump_automaton(h)
    assert dump_automaton(load_automaton(again)) == again


def test_round_trip_random_terms():
    for t in random_terms(17, 50, 3):
        p = compile_term(t, DEFAULT_ALPHABET)
        q = load_automaton(dump_automaton(p))
        assert len(q.states) == len(p.states)
        assert equiv(p, q).verified


def test_relation_round_trip():
    m, h = load_automaton(_data("fig2_M.aut")), load_automaton(_data("fig2_H.aut"))
    res = find_simulation(m, h)
    text = dump_relation(res.relation, m, h)
    assert text.startswith("relation S from M to H\n")
    assert load_relation(text, m, h) == res.relation


def test_unnamed_labels_are_positional():
    p = skip(DEFAULT_ALPHABET)
    assert list(state_labels(p).values()) == ["x0"]


@pytest.mark.parametrize("text,line", [
    ("external a\n", 1),
    ("automaton A\nstates s\ninit s:0.5\n", 3),
    ("automaton A\nstates s\ninit s:1/2\n", 3),
    ("automaton A\nstates s s\n", 2),
    ("automaton A\nstates s\ninit s:1\ntrans s a -> s:1\n", 0),
    ("automaton A\nstates s\ninit t:1\n", 3),
    ("automaton A\nstates s\ninit s:1\nwhat\n", 4),
])
def test_format_errors(text, line):
    with pytest.raises(FormatError) as e:
        load_automaton(text)
    assert e.value.line == line


def test_relation_errors():
    m, h = load_automaton(_data("fig2_M.aut")), load_automaton(_data("fig2_H.aut"))
    with pytest.raises(FormatError):
        load_relation("pair s1 ~ u0:1\n", m, h)
    with pytest.raises(FormatError):
        load_relation("relation S from M to H\npair s9 ~ u0:1\n", m, h)
