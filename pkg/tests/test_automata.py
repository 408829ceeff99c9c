from fractions import Fraction as F

import pytest

from pcka.automata import (ActionAlphabet, AutomatonError, ProbAutomaton, Transition, action,
                           deadlock, fresh_id, par, pchoice, plus, reachable, rename, run, seq,
                           skip, star, unfold)
from pcka.dist import Dist
from pcka.laws import random_terms
from pcka.rg import can_perform
from pcka.simulation import SimRelation, equiv, find_simulation, verify_simulation
from pcka.terms import compile_term

AL = ActionAlphabet("abc", ["i"])


def a(x="a"):
    return action(x, AL)


def ok(res):
    return res.verified


def test_alphabet_checks():
    with pytest.raises(AutomatonError):
        ActionAlphabet(["a"], ["a"])
    with pytest.raises(AutomatonError):
        ActionAlphabet(["tau"])
    with pytest.raises(AutomatonError):
        ActionAlphabet(["1x"])
    assert AL.is_unobservable("i") and AL.is_unobservable("tau") and not AL.is_unobservable("a")


def test_invariants_enforced():
    s = fresh_id()
    with pytest.raises(AutomatonError):
        ProbAutomaton([s], AL, [Transition(s, "zz", Dist.point(s))], Dist.point(s))
    with pytest.raises(AutomatonError):
        ProbAutomaton([s], AL, [], Dist.point(s + 10_000))


def test_fresh_ids_never_repeat():
    ids = [fresh_id() for _ in range(100)]
    assert len(set(ids)) == 100
    p, q = a(), a()
    assert not p.states & q.states


def test_deadlock():
    d = deadlock(AL)
    assert len(d.states) == 1 and not d.transitions and not d.finals
    assert ok(equiv(plus(d, deadlock(AL)), d))
    x, = d.states
    target = a()
    assert ok(verify_simulation([(x, target.initial)], d, target))


def test_skip_and_units():
    s = skip(AL)
    assert ok(verify_simulation([(x, Dist.point(x)) for x in s.states], s, s))
    p = seq(a(), plus(a("b"), a("c")))
    assert ok(equiv(seq(skip(AL), p), p))
    assert ok(equiv(seq(p, skip(AL)), p))


def test_action():
    p = a("a")
    assert len(p.transitions) == 1 and len(p.finals) == 1
    assert ok(find_simulation(p, a("a")))
    assert ok(equiv(par(a(), {"a"}, skip(AL)), deadlock(AL)))


def test_plus():
    p, q = seq(a(), a("b")), star(a("c"))
    assert ok(equiv(plus(p, deadlock(AL)), p))
    assert ok(equiv(plus(p, p), p))
    assert len(plus(p, q).states) == len(p.states) + len(q.states) + 1


def test_seq():
    assert ok(equiv(seq(deadlock(AL), a()), deadlock(AL)))
    p, q, r = a(), pchoice(a("b"), F(1, 3), skip(AL)), star(a("c"))
    left, right = seq(seq(p, q), r), seq(p, seq(q, r))
    # same automaton up to renaming of ids
    assert (len(left.states), len(left.transitions), len(left.finals)) == \
        (len(right.states), len(right.transitions), len(right.finals))
    assert ok(equiv(left, right))


def test_seq_trace():
    p = reachable(seq(a(), a("b")))
    x, = p.initial.support
    assert can_perform(p, x, ["a", "b"])
    assert not can_perform(p, x, ["b"])


def test_star():
    p = seq(a(), a("b"))
    assert ok(equiv(star(p), plus(skip(AL), seq(p, star(p)))))
    assert ok(equiv(star(deadlock(AL)), skip(AL)))
    assert len(star(p).finals) == 1


def test_pchoice():
    p, q, r = a(), seq(a("b"), a("c")), star(a("c"))
    assert ok(equiv(pchoice(p, F(1, 2), p), p))
    assert ok(equiv(pchoice(p, F(1, 5), q), pchoice(q, F(4, 5), p)))
    lhs = pchoice(p, F(1, 5), pchoice(q, F(1, 4), r))
    rhs = pchoice(pchoice(p, F(1, 2), q), F(2, 5), r)
    assert ok(equiv(lhs, rhs))
    with pytest.raises(Exception):
        pchoice(p, F(3, 2), q)


def test_par():
    p, q = seq(a(), a("b")), plus(a(), a("c"))
    assert ok(equiv(par(p, {"a"}, q), par(q, {"a"}, p)))
    assert ok(equiv(par(a(), {"a"}, a()), a()))
    assert not par(a(), {"a"}, skip(AL)).transitions
    with pytest.raises(AutomatonError):
        par(a(), {"i"}, a())


def test_run():
    assert ok(equiv(run({"a"}, AL), star(a())))
    with pytest.raises(AutomatonError):
        run(set(), AL)
    ab = ActionAlphabet("ab")
    r = run({"a", "b"}, ab)
    for t in random_terms(3, 12, 2, ab):
        p = compile_term(t, ab)
        assert ok(find_simulation(p, r)), t
        assert ok(equiv(par(p, {"a", "b"}, r), p)), t


def test_reachable():
    assert len(reachable(seq(deadlock(AL), a())).states) == 1
    for t in random_terms(8, 15, 2):
        p = compile_term(t, ActionAlphabet("abc"))
        r = reachable(p)
        assert reachable(r) is r
        assert ok(equiv(p, r))


def test_rename_is_fresh():
    p = star(a())
    m, states, trans, init, finals = rename(p)
    assert not states & p.states and len(trans) == len(p.transitions)


def test_unfold():
    p = star(seq(a(), a("b")))
    for d in range(4):
        u = unfold(p, d)
        rel = SimRelation((s, Dist.point(path[-1])) for s, path in u.paths.items())
        assert ok(verify_simulation(rel, u, p))
    assert ok(equiv(unfold(a(), 1), a()))
    assert len(unfold(a(), 1).states) == 2
    u = unfold(star(a()), 3)
    levels = {len(path) // 2 for path in u.paths.values()}
    assert levels == {0, 1, 2, 3}
    assert all(len(u.paths[t.source]) < len(u.paths[y]) for t in u.transitions
               for y in t.target.support)
    with pytest.raises(AutomatonError):
        unfold(p, -1)
