import itertools
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from pcka import ActionAlphabet, Dist, ProbAutomaton, Transition as T
from pcka.semantics import (AllFinal, Decompose, Equals, LiftsTo, WeakStatus, check_double_lift,
                            check_lift, combined_step, flatten, replay, weak_action, weak_reach)

AL = ActionAlphabet(["coin", "kick", "tea", "fail"], ["stuck"])


def d(**kw):
    return Dist({int(k[1:]): F(v) for k, v in kw.items()})


@pytest.fixture
def h():
    # states u0..u5 of the tea machine of the running example
    return ProbAutomaton(range(6), AL, [
        T(0, "kick", d(u2=1)), T(2, "kick", d(u4=1)),
        T(4, "kick", d(u4=1)), T(4, "tea", d(u4=1)), T(4, "fail", d(u4=1)),
        T(1, "kick", d(u3=1)), T(1, "tea", d(u5=1)), T(3, "tea", d(u5=1)),
    ], d(u0="1/25", u1="24/25"))


def test_lift_running_example():
    rho = d(u0="1/5", u1="4/5")
    s = [("s1", rho), ("s2", d(u1=1))]
    mu = Dist({"s1": F(1, 5), "s2": F(4, 5)})
    nu = Dist.combine([(F(1, 5), rho), (F(4, 5), d(u1=1))])
    w = check_lift(s, mu, nu)
    assert w is not None and w.validate(s, mu, nu)


def test_lift_identity_and_failure():
    mu = Dist({1: F(1, 3), 2: F(2, 3)})
    ident = [(x, Dist.point(x)) for x in (1, 2, 3)]
    w = check_lift(ident, mu, mu)
    assert sorted(w.rows, key=lambda r: r[1]) == [(F(1, 3), 1, Dist.point(1)), (F(2, 3), 2, Dist.point(2))]
    assert check_lift([("x", Dist.point("y"))], Dist.point("x"), Dist.point("z")) is None
    assert check_lift([("x", Dist.point("y"))], Dist.point("w"), Dist.point("y")) is None


def test_lift_needs_splitting():
    s = [("x", Dist.point(1)), ("x", Dist.point(2))]
    w = check_lift(s, Dist.point("x"), Dist({1: F(1, 4), 2: F(3, 4)}))
    assert w is not None and len(w.rows) == 2


def test_flatten():
    mu = Dist({1: F(1, 2), 2: F(1, 2)})
    assert flatten(Dist.point(mu)) == mu
    assert flatten(Dist({Dist.point("x"): F(1, 2), Dist.point("y"): F(1, 2)})) == Dist(
        {"x": F(1, 2), "y": F(1, 2)})
    psi = Dist({d(u0="1/5", u1="4/5"): F(1, 5), d(u1=1): F(4, 5)})
    assert flatten(psi) == d(u0="1/25", u1="24/25")


def test_double_lift():
    nu = Dist.point(7)
    w = check_double_lift([("x", nu)], Dist.point("x"), Dist.point(nu))
    assert w.w == {("x", nu): 1}
    a, b = Dist.point(1), Dist.point(2)
    s = [("x", a), ("y", b)]
    mu = Dist({"x": F(1, 2), "y": F(1, 2)})
    psi = Dist({a: F(1, 2), b: F(1, 2)})
    w = check_double_lift(s, mu, psi)
    assert w.w == {("x", a): F(1, 2), ("y", b): F(1, 2)} and w.validate(s, mu, psi)
    assert check_double_lift(s, mu, Dist.point(a)) is None


@st.composite
def lift_instances(draw):
    states = list(range(draw(st.integers(1, 4))))
    rels = []
    for x in states:
        for _ in range(draw(st.integers(1, 3))):
            ys = draw(st.lists(st.integers(10, 14), min_size=1, max_size=3, unique=True))
            raw = [draw(st.integers(1, 4)) for _ in ys]
            rels.append((x, Dist({y: F(r, sum(raw)) for y, r in zip(ys, raw)})))
    raw = [draw(st.integers(1, 4)) for _ in states]
    mu = Dist({x: F(r, sum(raw)) for x, r in zip(states, raw)})
    # a column distribution built from related dists, so a double lift exists
    cols = {}
    for x, p in mu.items():
        mine = [n for y, n in rels if y == x]
        k = draw(st.integers(0, len(mine) - 1))
        cols[mine[k]] = cols.get(mine[k], 0) + p
    return rels, mu, Dist(cols)


@settings(max_examples=60, deadline=None)
@given(lift_instances())
def test_double_lift_implies_lift_of_flatten(inst):
    rels, mu, psi = inst
    w = check_double_lift(rels, mu, psi)
    assert w is not None and w.validate(rels, mu, psi)
    lw = check_lift(rels, mu, flatten(psi))
    assert lw is not None and lw.validate(rels, mu, flatten(psi))
    assert lw.left() == mu and lw.right() == flatten(psi)


def test_combined_step_examples():
    al = ActionAlphabet(["a"])
    m1, m2 = Dist.point(1), Dist.point(2)
    p = ProbAutomaton([0, 1, 2], al, [T(0, "a", m1), T(0, "a", m2)], Dist.point(0))
    cs = combined_step(p, Dist.point(0), "a")
    assert cs.contains(m1) and cs.contains(Dist({1: F(1, 2), 2: F(1, 2)}))
    assert cs.contains(Dist.point(0)) is None
    one = ProbAutomaton([0, 1], al, [T(0, "a", m1)], Dist.point(0))
    assert [v for v, _ in combined_step(one, Dist.point(0), "a").vertices()] == [m1]
    assert combined_step(one, Dist.point(0), "tau").contains(Dist.point(0))


def _grid(k, den):
    for c in itertools.product(range(den + 1), repeat=k):
        if sum(c) == den:
            yield [F(v, den) for v in c]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.lists(st.integers(0, 4), min_size=1, max_size=5),
       st.integers(1, 8))
def test_combined_step_matches_brute_force(k, target_raw, den):
    al = ActionAlphabet(["a"])
    trans = [T(0, "a", Dist.point(i)) for i in range(1, k + 1)]
    p = ProbAutomaton(range(6), al, trans, Dist.point(0))
    cs = combined_step(p, Dist.point(0), "a")
    assume(0 < sum(target_raw) <= 8)  # denominators within the brute-force grid
    target = Dist({i + 1: F(v, sum(target_raw)) for i, v in enumerate(target_raw)})
    brute = any(
        Dist.combine((w, t.target) for w, t in zip(ws, trans)) == target
        for dd in range(1, 9) for ws in _grid(k, dd)
    )
    assert (cs.contains(target) is not None) == brute
    for ws in _grid(k, den):
        mix = Dist.combine((w, t.target) for w, t in zip(ws, trans))
        assert cs.contains(mix) is not None


def test_weak_reflexive(h):
    nu = d(u0="1/5", u1="4/5")
    r = weak_reach(h, nu, Equals(nu), horizon=0)
    assert r.status is WeakStatus.REACHED and r.derivation == ()


def test_weak_kick_running_example(h):
    nu = d(u0="1/5", u1="4/5")
    goal = Equals(d(u2="1/5", u3="4/5"))
    for fast in (True, False):
        r = weak_action(h, nu, "kick", goal, fast=fast)
        assert r.reached and r.target == d(u2="1/5", u3="4/5")
        replay(h, nu, "kick", r, goal)


def test_weak_internal_is_empty_move(h):
    nu = h.initial
    r = weak_action(h, nu, "stuck", Equals(nu))
    assert r.reached and r.derivation == ()


def test_weak_unreachable():
    al = ActionAlphabet(["a", "b"])
    act = ProbAutomaton([0, 1], al, [T(0, "a", Dist.point(1))], Dist.point(0), [1])
    r = weak_action(act, act.initial, "b", LiftsTo([], Dist.point("x")))
    assert r.status is WeakStatus.UNREACHABLE
    dead = ProbAutomaton([0], al, [], Dist.point(0))
    assert weak_reach(dead, dead.initial, AllFinal(dead.finals)).status is WeakStatus.UNREACHABLE


def _tau_chain(n):
    al = ActionAlphabet(["a"])
    trans = [T(i, "tau", Dist.point(i + 1)) for i in range(n)]
    return ProbAutomaton(range(n + 1), al, trans, Dist.point(0), [n])


def test_weak_horizon_monotone():
    p = _tau_chain(5)
    results = [weak_reach(p, p.initial, AllFinal(p.finals), horizon=h, fast=False) for h in range(8)]
    first = next(i for i, r in enumerate(results) if r.reached)
    assert first == 5
    assert all(r.reached for r in results[first:])
    assert all(r.status is WeakStatus.HORIZON_EXHAUSTED for r in results[:first])
    for r in results[first:]:
        replay(p, p.initial, None, r, AllFinal(p.finals))


def test_weak_limit_only_is_not_unreachable():
    al = ActionAlphabet(["a"])
    p = ProbAutomaton([0, 1], al, [T(0, "tau", Dist({0: F(1, 2), 1: F(1, 2)}))], Dist.point(0), [1])
    r = weak_reach(p, p.initial, Equals(Dist.point(1)), horizon=10)
    assert r.status is WeakStatus.HORIZON_EXHAUSTED
    r = weak_reach(p, p.initial, Equals(Dist({0: F(1, 8), 1: F(7, 8)})), fast=False)
    assert r.reached and len(r.derivation) == 3
    replay(p, p.initial, None, r)


def test_weak_lift_and_decompose_targets(h):
    nu = h.initial
    rel = [("s1", d(u2=1)), ("s2", d(u3=1))]
    mu = Dist({"s1": F(1, 25), "s2": F(24, 25)})
    r = weak_action(h, nu, "kick", LiftsTo(rel, mu), fast=False)
    assert r.reached and r.witness.validate(rel, mu, r.target)
    dec = Decompose(mu, {"s1": {2, 4}, "s2": {3}})
    r = weak_action(h, nu, "kick", dec, fast=False)
    assert r.reached and r.witness == {"s1": d(u2=1), "s2": d(u3=1)}
    r = weak_action(h, nu, "kick", Decompose(mu, {"s1": {3}, "s2": {2}}))
    assert r.status is WeakStatus.UNREACHABLE
