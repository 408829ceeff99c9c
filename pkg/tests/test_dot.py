from pcka.automata import skip
from pcka.dot import to_dot
from pcka.laws import DEFAULT_ALPHABET
from pcka.rg import _data
from pcka.textio import load_automaton


def test_skip():
    text = to_dot(skip(DEFAULT_ALPHABET))
    assert text.count("doublecircle") == 1
    assert text.count("[label=") == 1


def test_m_has_one_branch_node():
    m = load_automaton(_data("fig2_M.aut"))
    text = to_dot(m)
    assert text.count("shape=point") == 1
    assert 'label="1/5"' in text and 'label="4/5"' in text
    assert text.count("style=dashed") == 2


def test_byte_identical():
    a = to_dot(load_automaton(_data("fig3_Q.aut")))
    b = to_dot(load_automaton(_data("fig3_Q.aut")))
    assert a == b
