"""Simulation relations between probabilistic automata.

A relation ``S ⊆ P × D(Q)`` is checked clause by clause: the initial
distributions, every transition of every related state, and final states.
Each clause is one weak-transition query whose target is the lifting of
``S``.  The same queries, with the lifting witness read as a distribution
over distributions, check the forward-simulation formulation.

:func:`find_simulation` builds a relation by discharging obligations
breadth first.  New pairs are proposed by splitting the reached
distribution along a qualitative compatibility relation between states.  That
relation over-approximates every simulation; when a proposed pair turns out
impossible nothing is concluded.  ``Refuted`` is returned only when the
initial clause provably cannot be met.
"""

from __future__ import annotations

import enum
import itertools
import logging
from collections import defaultdict, deque
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from .automata import ProbAutomaton, Transition, plus, reachable
from .dist import Dist
from .lp import LinearSystem
from .semantics import (AllFinal, Decompose, DerivationError, Equals, LiftsTo, WeakResult,
                        WeakStatus, check_double_lift, default_horizon, flatten, replay,
                        weak_action, weak_reach)

__all__ = [
    "SimRelation", "RelationError", "Verdict", "Obligation", "CheckResult",
    "verify_simulation", "verify_forward_simulation", "forward_witness_from_sim",
    "find_simulation", "leq", "equiv", "leq_via_plus", "compose", "identity_relation",
    "compatibility", "DEFAULT_BUDGET",
]

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 5000
# cap on deterministic picks per distribution when composing relations
COMPOSE_PICKS = 16
MAX_RESTARTS = 25
# unfolded states allowed in one lookahead repair
LOOKAHEAD_NODES = 400
LOOKAHEAD_UP = 8


class RelationError(ValueError):
    """A relation mentions states that do not exist."""


class SimRelation:
    """Finite set of pairs ``(state of P, Dist over states of Q)``."""

    __slots__ = ("pairs", "_grouped")

    def __init__(self, pairs: Iterable[tuple[Hashable, Dist]]):
        self.pairs = frozenset(pairs)
        self._grouped: dict[Hashable, list[Dist]] | None = None

    @property
    def grouped(self) -> dict[Hashable, list[Dist]]:
        if self._grouped is None:
            g: dict[Hashable, list[Dist]] = defaultdict(list)
            for x, nu in self.sorted_pairs():
                g[x].append(nu)
            self._grouped = dict(g)
        return self._grouped

    def sorted_pairs(self) -> list[tuple[Hashable, Dist]]:
        return sorted(self.pairs, key=lambda xn: (xn[0], repr(xn[1].sorted_items())))

    def validate(self, p: ProbAutomaton, q: ProbAutomaton) -> None:
        for x, nu in self.pairs:
            if x not in p.states:
                raise RelationError(f"state {x!r} is not a state of the left automaton")
            if not isinstance(nu, Dist) or not nu.support <= q.states:
                raise RelationError(f"{nu!r} is not a distribution over the right automaton")

    def left_states(self) -> frozenset:
        return frozenset(x for x, _ in self.pairs)

    def __iter__(self):
        return iter(self.sorted_pairs())

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, item: object) -> bool:
        return item in self.pairs

    def __or__(self, other: "SimRelation") -> "SimRelation":
        return SimRelation(self.pairs | other.pairs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimRelation) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"SimRelation({len(self.pairs)} pairs)"


def identity_relation(p: ProbAutomaton) -> SimRelation:
    return SimRelation((x, Dist.point(x)) for x in p.states)


class Verdict(enum.Enum):
    VERIFIED = "Verified"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self) -> int:
        return {"Verified": 0, "Refuted": 1, "Inconclusive": 2}[self.value]

    @staticmethod
    def worst(verdicts: Iterable["Verdict"]) -> "Verdict":
        order = [Verdict.VERIFIED, Verdict.INCONCLUSIVE, Verdict.REFUTED]
        return max(verdicts, key=order.index, default=Verdict.VERIFIED)


@dataclass(frozen=True)
class Obligation:
    """One clause instance: ``initial``, ``step`` (pair + transition) or ``final`` (pair)."""

    kind: str
    state: Hashable = None
    dist: Dist | None = None
    transition: Transition | None = None

    def describe(self, p: ProbAutomaton | None = None, q: ProbAutomaton | None = None) -> str:
        lp = p.label if p is not None else str
        lq = q.label if q is not None else str

        def dist(d: Dist) -> str:
            return " ".join(f"{lq(y)}:{w}" for y, w in d.sorted_items())

        if self.kind == "initial":
            return "initial distributions"
        pair = f"({lp(self.state)}, {dist(self.dist)})"
        if self.kind == "final":
            return f"final state {lp(self.state)} in pair {pair}"
        t = self.transition
        tgt = " ".join(f"{lp(x)}:{w}" for x, w in t.target.sorted_items())
        return f"pair {pair}, transition {lp(t.source)} -{t.action}-> {tgt}"


@dataclass
class CheckResult:
    status: Verdict
    relation: SimRelation | None = None
    derivations: dict[Obligation, WeakResult] = field(default_factory=dict)
    failure: Obligation | None = None
    reason: str = ""
    missing: tuple = ()
    psis: dict[Obligation, Dist] = field(default_factory=dict)
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.status is Verdict.VERIFIED

    def __bool__(self) -> bool:
        return self.verified

    def summary(self, p: ProbAutomaton | None = None, q: ProbAutomaton | None = None) -> str:
        line = self.status.value
        if self.failure is not None:
            line += f": {self.failure.describe(p, q)}"
        if self.reason:
            line += f" ({self.reason})"
        return line


# -- obligations ---------------------------------------------------------------

def _obligations(s: SimRelation, p: ProbAutomaton) -> list[Obligation]:
    obs = [Obligation("initial")]
    for x, nu in s:
        for t in sorted(p.out(x), key=lambda t: (t.action, repr(t.target.sorted_items()))):
            obs.append(Obligation("step", x, nu, t))
        if x in p.finals:
            obs.append(Obligation("final", x, nu))
    return obs


def _query(ob: Obligation, target_for, p: ProbAutomaton, q: ProbAutomaton, horizon: int | None,
           **kw) -> tuple[WeakResult, Any, Dist, str | None]:
    if ob.kind == "initial":
        tgt = target_for(p.initial)
        return weak_reach(q, q.initial, tgt, horizon, **kw), tgt, q.initial, None
    if ob.kind == "final":
        tgt = AllFinal(q.finals)
        return weak_reach(q, ob.dist, tgt, horizon, **kw), tgt, ob.dist, None
    t = ob.transition
    tgt = target_for(t.target)
    return weak_action(q, ob.dist, t.action, tgt, horizon, **kw), tgt, ob.dist, t.action


def _missing(s: SimRelation, p: ProbAutomaton) -> tuple:
    return tuple(sorted(reachable(p).states - s.left_states()))


def verify_simulation(s: SimRelation | Iterable, p: ProbAutomaton, q: ProbAutomaton,
                      horizon: int | None = None) -> CheckResult:
    """Check clauses 1-3 of probabilistic simulation for ``S`` from ``p`` to ``q``.

    The first obligation that is provably unsatisfiable gives ``Refuted``; an
    obligation that could only be met beyond ``horizon`` gives ``Inconclusive``.
    Every derivation of a ``Verified`` result has been replayed.
    """
    s = s if isinstance(s, SimRelation) else SimRelation(s)
    if p.alphabet != q.alphabet:
        raise RelationError("automata have different alphabets")
    s.validate(p, q)
    grouped = s.grouped
    derivs: dict[Obligation, WeakResult] = {}
    pending: list[Obligation] = []
    for ob in _obligations(s, p):
        res, tgt, start, act = _query(ob, lambda mu: LiftsTo(grouped, mu), p, q, horizon)
        if res.status is WeakStatus.UNREACHABLE:
            return CheckResult(Verdict.REFUTED, s, failure=ob, reason="no matching weak transition",
                               missing=_missing(s, p))
        if res.status is WeakStatus.HORIZON_EXHAUSTED:
            pending.append(ob)
            continue
        replay(q, start, act, res, tgt)
        derivs[ob] = res
    if pending:
        return CheckResult(Verdict.INCONCLUSIVE, s, derivs, failure=pending[0],
                           reason=f"horizon {horizon or default_horizon(q)} exhausted",
                           missing=_missing(s, p))
    return CheckResult(Verdict.VERIFIED, s, derivs, missing=_missing(s, p))


def forward_witness_from_sim(result: CheckResult) -> dict[Obligation, Dist]:
    """``ψ = Σ pᵢ δ_{νᵢ}`` from each lifting decomposition of a verified check.

    Final-state obligations get ``δ_{ν′}`` for the reached ``ν′``.
    """
    out = {}
    for ob, res in result.derivations.items():
        if ob.kind == "final":
            out[ob] = Dist.point(res.target)
        else:
            out[ob] = res.witness.as_double()
    return out


def verify_forward_simulation(s: SimRelation | Iterable, p: ProbAutomaton, q: ProbAutomaton,
                              horizon: int | None = None,
                              psis: Mapping[Obligation, Dist] | None = None) -> CheckResult:
    """Check the forward-simulation clauses a-c, with double lifting and flattening.

    Given ``psis``, each listed obligation must be met by exactly that ``ψ``:
    ``μ′ S̿ ψ`` and a weak transition to ``π(ψ)``.  Otherwise ``ψ`` is searched
    among distributions over the right-hand sides occurring in ``S``; any
    double-lifting witness has its support there, so the search is complete.
    """
    s = s if isinstance(s, SimRelation) else SimRelation(s)
    if p.alphabet != q.alphabet:
        raise RelationError("automata have different alphabets")
    s.validate(p, q)
    grouped = s.grouped
    psis = psis or {}
    derivs: dict[Obligation, WeakResult] = {}
    found: dict[Obligation, Dist] = {}
    pending: list[Obligation] = []
    for ob in _obligations(s, p):
        mu = p.initial if ob.kind == "initial" else (ob.transition.target if ob.kind == "step" else None)
        given = psis.get(ob)
        if given is not None:
            if ob.kind == "final":
                ok = all(n.support <= q.finals for n in given)
            else:
                ok = check_double_lift(grouped, mu, given) is not None
            if not ok:
                return CheckResult(Verdict.REFUTED, s, failure=ob, reason="given ψ is not a double lifting")
            tgt = Equals(flatten(given))
            if ob.kind == "final":
                res, start, act = weak_reach(q, ob.dist, tgt, horizon), ob.dist, None
            else:
                res, tgt, start, act = _query(ob, lambda _m: tgt, p, q, horizon)
        else:
            res, tgt, start, act = _query(ob, lambda m: LiftsTo(grouped, m), p, q, horizon)
        if res.status is WeakStatus.UNREACHABLE:
            return CheckResult(Verdict.REFUTED, s, failure=ob, reason="no matching weak transition")
        if res.status is WeakStatus.HORIZON_EXHAUSTED:
            pending.append(ob)
            continue
        replay(q, start, act, res, tgt)
        if given is not None:
            psi = given
        elif ob.kind == "final":
            psi = Dist.point(res.target)
        else:
            psi = res.witness.as_double()
            if check_double_lift(grouped, mu, psi) is None:
                raise DerivationError("lifting witness does not yield a double lifting")
        if flatten(psi) != res.target:
            raise DerivationError("flattened ψ differs from the reached distribution")
        derivs[ob] = res
        found[ob] = psi
    if pending:
        return CheckResult(Verdict.INCONCLUSIVE, s, derivs, failure=pending[0],
                           reason="horizon exhausted", psis=found)
    return CheckResult(Verdict.VERIFIED, s, derivs, psis=found)


# -- qualitative compatibility -------------------------------------------------

class _Attractors:
    """Sure-reachability operators on ``q`` used by :func:`compatibility`."""

    def __init__(self, q: ProbAutomaton):
        self.q = q
        self.unobs = [t for t in q.transitions if q.alphabet.is_unobservable(t.action)]
        self.by_succ: dict[Hashable, list[int]] = defaultdict(list)
        for i, t in enumerate(self.unobs):
            for y in t.target.support:
                self.by_succ[y].append(i)
        self.by_action: dict[str, list[Transition]] = defaultdict(list)
        for t in q.transitions:
            self.by_action[t.action].append(t)
        self._cache: dict[tuple, frozenset] = {}

    def attr(self, target: Iterable[Hashable]) -> frozenset:
        """States from which some finite unobservable strategy surely ends in ``target``."""
        zone = set(target)
        left = [len(t.target) for t in self.unobs]
        todo = deque(zone)
        while todo:
            y = todo.popleft()
            for i in self.by_succ.get(y, ()):
                left[i] -= 1
                if not left[i]:
                    src = self.unobs[i].source
                    if src not in zone:
                        zone.add(src)
                        todo.append(src)
        return frozenset(zone)

    def weak_pre(self, a: str, target: frozenset) -> frozenset:
        key = (a, target)
        if key not in self._cache:
            inner = self.attr(target)
            if self.q.alphabet.is_unobservable(a):
                res = inner
            else:
                pre = {t.source for t in self.by_action.get(a, ()) if t.target.support <= inner}
                res = self.attr(pre)
            self._cache[key] = res
        return self._cache[key]


def compatibility(p: ProbAutomaton, q: ProbAutomaton,
                  removed: Iterable[tuple[Hashable, Hashable]] = ()) -> dict[Hashable, frozenset]:
    """Largest ``C`` such that ``y ∈ C(x)`` whenever ``y`` may carry mass simulating ``x``.

    Every simulation ``S`` satisfies ``supp ν ⊆ C(x)`` for ``(x, ν) ∈ S``;
    pairs in ``removed`` are excluded from the start.
    """
    att = _Attractors(q)
    ban: dict[Hashable, set] = defaultdict(set)
    for x, y in removed:
        ban[x].add(y)
    fin = att.attr(q.finals)
    everything = frozenset(q.states)
    comp = {x: (fin if x in p.finals else everything) - ban.get(x, set()) for x in p.states}
    changed = True
    while changed:
        changed = False
        for x in sorted(p.states):
            cur = comp[x]
            for t in p.out(x):
                if not cur:
                    break
                parts = [comp[y] for y in t.target.support]
                if not all(parts):
                    # a lifting needs a partner for every successor
                    cur = frozenset()
                    break
                cur = cur & att.weak_pre(t.action, frozenset().union(*parts))
            if cur != comp[x]:
                comp[x] = cur
                changed = True
    return comp


# -- search ----------------------------------------------------------------------

def _settle(q: ProbAutomaton, nu: Dist, allowed: frozenset) -> Dist:
    """Push mass through forced unobservable steps.

    A non-final state whose only transition is unobservable can do nothing
    except take it, so proposing the target loses no options and commits the
    right side to probabilistic splits it cannot avoid anyway.  States on a
    cycle of forced steps keep their mass.
    """
    forced = _forced_steps(q)
    for _ in range(len(q.states)):
        parts, moved = [], False
        for y, w in nu.items():
            t = forced.get(y)
            if t is not None and t.support <= allowed:
                parts.append((w, t))
                moved = True
            else:
                parts.append((w, Dist.point(y)))
        if not moved:
            break
        nu = Dist.combine(parts)
    return nu


def _forced_steps(q: ProbAutomaton) -> dict[Hashable, Dist]:
    """Forced unobservable steps, minus those of states on a forced cycle."""
    out = {}
    for y in q.states:
        outs = q.out(y)
        if y not in q.finals and len(outs) == 1 and q.alphabet.is_unobservable(outs[0].action):
            out[y] = outs[0].target
    # a state keeps its step only if following forced steps never returns to it
    cyclic = set()
    for y in out:
        seen, todo = set(), list(out[y].support)
        while todo:
            z = todo.pop()
            if z == y:
                cyclic.add(y)
                break
            if z in out and z not in seen:
                seen.add(z)
                todo.extend(out[z].support)
    return {y: d for y, d in out.items() if y not in cyclic}


def _grow(pr: ProbAutomaton, qr: ProbAutomaton, comp: Mapping[Hashable, frozenset],
          horizon: int | None, budget: int, stats: dict[str, Any], hints: Mapping = {}):
    """One breadth-first attempt; returns ``(relation, None)`` or ``(pairs, failure)``.

    A failure is ``(ob, status, reason)``.  ``pairs`` maps each pair to the
    pair whose obligation proposed it (``None`` for the initial split).
    """
    res = weak_reach(qr, qr.initial, Decompose(pr.initial, comp), horizon)
    if not res.reached:
        return set(), (Obligation("initial"), res.status, "initial distribution cannot be split")
    grouped: dict[Hashable, list[Dist]] = defaultdict(list)
    seen: dict[tuple[Hashable, Dist], tuple | None] = {}
    queue: deque[tuple[Hashable, Dist]] = deque()

    def add(x, nu, parent, settle=True):
        if settle:
            nu = _settle(qr, nu, comp[x])
        if (x, nu) not in seen:
            seen[(x, nu)] = parent
            grouped[x].append(nu)
            queue.append((x, nu))

    for x, nu in sorted(res.witness.items()):
        add(x, nu, None)
    while queue:
        x, nu = queue.popleft()
        for ob in _obligations(SimRelation([(x, nu)]), pr)[1:]:
            stats["work"] += 1
            if stats["work"] > budget:
                return seen, (ob, None, f"budget {budget} exhausted")
            if ob.kind == "final":
                r, *_ = _query(ob, None, pr, qr, horizon)
                if r.reached:
                    continue
            else:
                hint = hints.get((x, nu, ob.transition))
                if hint is not None:
                    r, *_ = _query(ob, lambda mu: Equals(Dist.combine(
                        (w, hint[y]) for y, w in mu.items())), pr, qr, horizon, certify=False)
                    if r.reached:
                        for y, d in sorted(hint.items()):
                            add(y, d, (x, nu), settle=False)
                        continue
                r, *_ = _query(ob, lambda mu: LiftsTo(grouped, mu), pr, qr, horizon,
                               certify=False)
                if r.reached:
                    continue
                r, *_ = _query(ob, lambda mu: Decompose(mu, comp), pr, qr, horizon)
                if r.reached:
                    for y, d in sorted(r.witness.items()):
                        add(y, d, (x, nu))
                    continue
            return seen, (ob, r.status, "proposed pair cannot be matched")
    return seen, None


def _blame(ob: Obligation, pr: ProbAutomaton, qr: ProbAutomaton,
           comp: Mapping[Hashable, frozenset], horizon: int | None) -> set:
    """Points of the failing pair's distribution that cannot meet the obligation alone."""
    if ob.dist.is_point():
        return {(ob.state, y) for y in ob.dist.support}
    out = set()
    for y in sorted(ob.dist.support):
        single = Obligation(ob.kind, ob.state, Dist.point(y), ob.transition)
        r, *_ = _query(single, lambda mu: Decompose(mu, comp), pr, qr, horizon)
        if r.status is WeakStatus.UNREACHABLE:
            out.add((ob.state, y))
    return out


def _lookahead(pr: ProbAutomaton, qr: ProbAutomaton, comp: Mapping[Hashable, frozenset],
               root: tuple[Hashable, Dist], depth: int) -> dict | None:
    """Re-solve the obligations of ``root`` jointly with ``depth`` levels below it.

    The left automaton is unfolded from ``root`` with one unknown distribution
    per state and level, and every weak step becomes a flow whose source is
    such an unknown.  The result maps ``(x, ν, transition)`` to the proposed
    distribution of each successor; ``None`` when the relaxation is
    infeasible or the unfolding is too large.
    """
    x0, nu0 = root
    alpha = qr.alphabet
    levels = [{x0}]
    for _ in range(depth):
        levels.append({y for x in levels[-1] for t in pr.out(x) for y in t.target.support})
    if sum(len(lv) for lv in levels) > LOOKAHEAD_NODES:
        return None
    lp = LinearSystem()
    nu: dict[tuple[Hashable, int], dict[Hashable, Any]] = {(x0, 0): dict(nu0.items())}
    for lev in range(1, depth + 1):
        for x in sorted(levels[lev]):
            nu[(x, lev)] = {y: lp.var(("nu", x, lev, y)) for y in sorted(comp[x])}
            lp.eq({v: 1 for v in nu[(x, lev)].values()}, 1)

    def closure(states):
        seen, todo = set(states), list(states)
        while todo:
            y = todo.pop()
            for t in qr.out(y):
                if alpha.is_unobservable(t.action):
                    for z in t.target.support - seen:
                        seen.add(z)
                        todo.append(z)
        return sorted(seen)

    def flow(region, key, stop_ok, sink=None):
        """Rows ``out - in + stop = ν[key]`` over ``region``; returns the stop variables."""
        rows: dict[Hashable, dict] = {y: {} for y in region}
        const: dict[Hashable, Any] = {y: 0 for y in region}
        if key is not None:
            for y, c in nu[key].items():
                if key[1] == 0:
                    const[y] = c
                else:
                    rows[y][c] = -1
        for y in region:
            for t in qr.out(y):
                if alpha.is_unobservable(t.action):
                    v = lp.var(("f", t), 1.0)
                    rows[y][v] = rows[y].get(v, 0) + 1
                    for z, w in t.target.items():
                        rows[z][v] = rows[z].get(v, 0) - w
        if sink is not None:
            for y, extra in sink.items():
                for v, c in extra.items():
                    rows[y][v] = rows[y].get(v, 0) + c
        stop = {y: lp.var(("stop", y)) for y in region if stop_ok(y)}
        for y, v in stop.items():
            rows[y][v] = 1
        for y in region:
            lp.eq(rows[y], const[y])
        return stop

    plan = []
    for lev in range(depth):
        for x in sorted(levels[lev]):
            key = (x, lev)
            region1 = closure(nu[key].keys())
            if x in pr.finals:
                flow(region1, key, lambda y: y in qr.finals)
            for t in pr.out(x):
                if alpha.is_unobservable(t.action):
                    stop = flow(region1, key, lambda y: True)
                else:
                    g = {}
                    moves = {y: {} for y in region1}
                    for y in region1:
                        for u in qr.out(y):
                            if u.action == t.action:
                                g[u] = lp.var(("g", u), 1.0)
                                moves[y][g[u]] = 1
                    flow(region1, key, lambda y: False, sink=moves)
                    region2 = closure({z for u in g for z in u.target.support})
                    into: dict[Hashable, dict] = {y: {} for y in region2}
                    for u, v in g.items():
                        for z, w in u.target.items():
                            into[z][v] = -w
                    stop = flow(region2, None, lambda y: True, sink=into)
                # what stops must be the successors' distributions, weighted by the step
                want: dict[Hashable, dict] = defaultdict(dict)
                for x2, w in t.target.items():
                    for y, v in nu[(x2, lev + 1)].items():
                        want[y][v] = want[y].get(v, 0) + w
                for y in set(stop) | set(want):
                    row = {v: -c for v, c in want.get(y, {}).items()}
                    if y in stop:
                        row[stop[y]] = 1
                    lp.eq(row, 0)
                plan.append((key, t))
    # only a proposal: an uncertified "infeasible" merely skips this repair
    sol = lp.solve(certify_infeasible=False)
    if sol is None:
        return None

    def value(key):
        if key[1] == 0:
            return nu0
        return Dist({y: sol[v] for y, v in nu[key].items() if sol.get(v)})

    return {(x, value((x, lev)), t): {x2: value((x2, lev + 1)) for x2 in t.target.support}
            for (x, lev), t in plan}


def _repair(parents: Mapping[tuple, tuple | None], ob: Obligation, pr: ProbAutomaton,
            qr: ProbAutomaton, comp: Mapping[Hashable, frozenset], hints: Mapping) -> dict | None:
    """Lookahead from the nearest ancestor of the failing pair that yields new proposals."""
    pair = (ob.state, ob.dist)
    chain = [pair]
    while len(chain) <= LOOKAHEAD_UP and parents.get(chain[-1]) is not None:
        chain.append(parents[chain[-1]])
    for depth, root in enumerate(chain, 1):
        found = _lookahead(pr, qr, comp, root, depth)
        if found and any(hints.get(k) != v for k, v in found.items()):
            return found
    return None


def find_simulation(p: ProbAutomaton, q: ProbAutomaton, horizon: int | None = None,
                    budget: int = DEFAULT_BUDGET) -> CheckResult:
    """Best-effort search for a simulation from ``p`` to ``q``.

    ``Verified`` results carry the relation and have passed
    :func:`verify_simulation`.  ``Refuted`` means no relation whatsoever meets
    the initial clause.  Pairs are proposed by splitting each obligation over
    compatible states.  When a proposal fails the search restarts, first
    steered by a lookahead repair of an ancestor proposal (see
    :func:`_lookahead`), and if that strategy gives up, once more from scratch
    with bans: a failed ``(x, δy)`` stops offering ``y`` for ``x``.  Neither
    steering ever justifies a refutation.  Running out of ``budget``
    obligations (per strategy) or restarts gives ``Inconclusive``.
    """
    if p.alphabet != q.alphabet:
        raise RelationError("automata have different alphabets")
    pr, qr = reachable(p), reachable(q)
    comp = compatibility(pr, qr)
    stats: dict[str, Any] = {"work": 0, "pairs": 0, "restarts": 0}
    start = frozenset().union(*(comp[x] for x in pr.initial.support))
    if not qr.initial.support <= _Attractors(qr).attr(start):
        return CheckResult(Verdict.REFUTED, failure=Obligation("initial"),
                           reason="no compatible states for the initial distribution", stats=stats)
    res = weak_reach(qr, qr.initial, Decompose(pr.initial, comp), horizon)
    if res.status is WeakStatus.UNREACHABLE:
        return CheckResult(Verdict.REFUTED, failure=Obligation("initial"),
                           reason="initial distribution cannot be split over compatible states",
                           stats=stats)
    for strategy in ("lookahead", "bans"):
        result = _search(p, q, pr, qr, comp, horizon, budget, strategy == "lookahead")
        for k, v in result.stats.items():
            stats[k] = v if k == "pairs" else stats.get(k, 0) + v
        stats["strategy"] = strategy
        result.stats = stats
        if result.verified:
            break
    return result


def _search(p, q, pr, qr, comp, horizon, budget, repairs: bool) -> CheckResult:
    stats: dict[str, Any] = {"work": 0, "pairs": 0, "restarts": 0, "repairs": 0}
    banned: set[tuple[Hashable, Hashable]] = set()
    hints: dict = {}
    cur = comp
    while True:
        seen, failure = _grow(pr, qr, cur, horizon, budget, stats, hints)
        stats["pairs"] = len(seen)
        if failure is None:
            break
        ob, status, reason = failure
        relation = SimRelation(seen)
        if status is None or status is WeakStatus.HORIZON_EXHAUSTED:
            why = reason if status is None else "horizon exhausted"
            return CheckResult(Verdict.INCONCLUSIVE, relation, failure=ob, reason=why, stats=stats)
        if stats["restarts"] >= MAX_RESTARTS or ob.kind == "initial":
            return CheckResult(Verdict.INCONCLUSIVE, relation, failure=ob,
                               reason=f"{reason}; search is incomplete", stats=stats)
        stats["restarts"] += 1
        if repairs:
            found = _repair(seen, ob, pr, qr, cur, hints)
            if not found:
                return CheckResult(Verdict.INCONCLUSIVE, relation, failure=ob,
                                   reason=f"{reason}; no repair found", stats=stats)
            hints.update(found)
            stats["repairs"] += 1
            continue
        new = _blame(ob, pr, qr, cur, horizon) - banned
        if not new:
            return CheckResult(Verdict.INCONCLUSIVE, relation, failure=ob,
                               reason=f"{reason}; search is incomplete", stats=stats)
        banned |= new
        cur = compatibility(pr, qr, banned)
    relation = SimRelation(seen)
    result = verify_simulation(relation, p, q, horizon)
    result.stats = stats
    if result.status is Verdict.REFUTED:
        result.status = Verdict.INCONCLUSIVE
        result.reason = "constructed relation failed verification: " + result.reason
    return result


def leq(p: ProbAutomaton, q: ProbAutomaton, horizon: int | None = None,
        budget: int = DEFAULT_BUDGET) -> CheckResult:
    """``p ≤ q``: search a simulation between the reachable parts."""
    return find_simulation(p, q, horizon, budget)


def _both(fwd: CheckResult, bwd: CheckResult) -> CheckResult:
    status = Verdict.worst([fwd.status, bwd.status])
    bad = fwd if fwd.status is status else bwd
    out = CheckResult(status, fwd.relation, fwd.derivations, bad.failure, bad.reason,
                      stats={"forward": fwd, "backward": bwd})
    return out


def equiv(p: ProbAutomaton, q: ProbAutomaton, horizon: int | None = None,
          budget: int = DEFAULT_BUDGET) -> CheckResult:
    """``p ≡ q``; ``stats`` holds the results of both directions."""
    return _both(leq(p, q, horizon, budget), leq(q, p, horizon, budget))


def leq_via_plus(p: ProbAutomaton, q: ProbAutomaton, horizon: int | None = None,
                 budget: int = DEFAULT_BUDGET) -> CheckResult:
    """``p ≤ q`` decided as ``p + q ≡ q``."""
    s = plus(p, q)
    return _both(find_simulation(s, q, horizon, budget), find_simulation(q, s, horizon, budget))


def compose(s1: SimRelation, s2: SimRelation) -> SimRelation:
    """``{(x, ρ) | x S₁ ν, ρ = Σ ν(y)·ρ_y with y S₂ ρ_y}`` over a bounded set of picks."""
    g2 = s2.grouped
    out = set()
    for x, nu in s1:
        ys = [y for y, _ in nu.sorted_items()]
        if any(y not in g2 for y in ys):
            continue
        for pick in itertools.islice(itertools.product(*(g2[y] for y in ys)), COMPOSE_PICKS):
            out.add((x, Dist.combine((nu[y], r) for y, r in zip(ys, pick))))
    return SimRelation(out)
