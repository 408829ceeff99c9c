import random
from fractions import Fraction as F

import pytest

from pcka.automata import ActionAlphabet, deadlock, plus, reachable
from pcka.dist import Dist
from pcka.laws import DEFAULT_ALPHABET, random_terms, verified_pairs
from pcka.rg import _data
from pcka.semantics import flatten
from pcka.simulation import (RelationError, SimRelation, Verdict, compose, equiv,
                             find_simulation, forward_witness_from_sim, identity_relation, leq,
                             leq_via_plus, verify_forward_simulation, verify_simulation)
from pcka.terms import compile_term, parse_term
from pcka.textio import load_automaton, load_relation

AL = DEFAULT_ALPHABET


def c(text):
    return compile_term(parse_term(text, AL), AL)


@pytest.fixture(scope="module")
def fig2():
    m, h = load_automaton(_data("fig2_M.aut")), load_automaton(_data("fig2_H.aut"))
    return m, h


def test_printed_relation_is_refuted(fig2):
    # (s1, u2) must match s1 -stuck-> s3 and then s3 -kick-> needs a pair (s1, u4) reached by
    # kick from u2; the printed pairs have no state of M related to the final u4 after kick
    m, h = fig2
    res = verify_simulation(load_relation(_data("fig2_S.rel"), m, h), m, h, 6)
    assert res.status is Verdict.REFUTED
    assert res.failure.kind == "step" and m.label(res.failure.state) == "s3"


def test_completed_relation(fig2):
    m, h = fig2
    rel = load_relation(_data("fig2_S_completed.rel"), m, h)
    assert verify_simulation(rel, m, h, 6).verified
    fwd = verify_forward_simulation(rel, m, h, 6)
    assert fwd.verified


def test_forward_witness_of_initial_decomposition(fig2):
    m, h = fig2
    rel = load_relation(_data("fig2_S_completed.rel"), m, h)
    res = verify_simulation(rel, m, h, 6)
    psis = forward_witness_from_sim(res)
    init = next(ob for ob in psis if ob.kind == "initial")
    u = {h.label(s): s for s in h.states}
    expect = Dist({Dist({u["u0"]: F(1, 5), u["u1"]: F(4, 5)}): F(1, 5),
                   Dist.point(u["u1"]): F(4, 5)})
    assert psis[init] == expect
    assert flatten(expect) == Dist({u["u0"]: F(1, 25), u["u1"]: F(24, 25)})
    for ob, psi in psis.items():
        assert flatten(psi) == res.derivations[ob].target
    assert verify_forward_simulation(rel, m, h, 6, psis=psis).verified


def test_singleton_decomposition_gives_point_psi():
    p = c("a . b")
    res = verify_simulation(identity_relation(p), p, p)
    for ob, psi in forward_witness_from_sim(res).items():
        assert psi.is_point()


def test_identity_and_clause_2_failure():
    p = c("a . (b + c*)")
    assert verify_simulation(identity_relation(p), p, p).verified
    assert verify_forward_simulation(identity_relation(p), p, p).verified
    q = c("b")
    x, = p.initial.support
    y, = q.initial.support
    res = verify_simulation([(x, Dist.point(y))], p, q)
    assert res.status is Verdict.REFUTED and res.failure.kind == "step"


def test_relation_validation():
    p, q = c("a"), c("b")
    with pytest.raises(RelationError):
        verify_simulation([(next(iter(q.states)), q.initial)], p, q)
    with pytest.raises(RelationError):
        verify_simulation([], p, compile_term(parse_term("a"), ActionAlphabet("a")))


def test_search_examples(fig2):
    p = c("a . b + a . c")
    q = c("a . (b + c)")
    assert find_simulation(p, q).verified
    back = find_simulation(q, p)
    assert back.status is Verdict.REFUTED
    assert find_simulation(p, p).verified
    m, h = fig2
    res = find_simulation(m, h, budget=10000)
    assert res.verified and verify_simulation(res.relation, m, h).verified
    assert find_simulation(h, m).status is Verdict.REFUTED


def test_reachable_equivalence():
    for t in random_terms(21, 10, 3):
        p = compile_term(t, AL)
        assert equiv(p, reachable(p)).verified


def test_deadlock_is_least():
    for t in random_terms(4, 10, 2):
        assert leq(deadlock(AL), compile_term(t, AL)).verified


def test_leq_agrees_with_plus_characterisation():
    rng = random.Random(7)
    terms = random_terms(13, 60, 2, max_states=12)
    agree = 0
    for _ in range(100):
        s, t = rng.sample(terms, 2)
        p, q = compile_term(s, AL), compile_term(t, AL)
        a, b = leq(p, q), leq_via_plus(p, q)
        assert a.status == b.status, (s, t)
        agree += 1
    assert agree == 100


def test_transitivity_by_composition():
    extra = c("a . b + c")
    for p, q, s1 in verified_pairs(3, 6):
        r = plus(q, extra)
        s2 = find_simulation(q, r)
        assert s2.verified
        assert verify_simulation(compose(s1, s2.relation), p, r).verified



def test_search_terminates_on_leaky_tau_cycle():
    # x5 -tau-> 1/5 x0 + 4/5 x2 and x0 -tau-> x5: pushing mass round the loop never settles
    p = c("(1 +[1/5] a)* ||{a,b} a")
    res = find_simulation(p, p, budget=200)
    assert res.verified
    assert res.stats["pairs"] == len(reachable(p).states)
