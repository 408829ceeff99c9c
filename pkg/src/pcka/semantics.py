"""Lifting of relations to distributions, combined steps and weak transitions.

A relation here is any finite collection of pairs ``(state, Dist)``.  All
feasibility questions are answered by :class:`pcka.lp.LinearSystem`, and every
witness handed back can be re-validated without the solver.

Actions in ``internal ∪ {tau}`` are unobservable: weak transitions close over
all of them, and an unobservable step may leave a state where it is.
"""

from __future__ import annotations

import enum
import itertools
from collections import defaultdict, deque
from collections.abc import Callable, Hashable, Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .automata import ProbAutomaton, Transition
from .dist import Dist
from .lp import LinearSystem

__all__ = [
    "LiftWitness", "DoubleLiftWitness", "check_lift", "check_double_lift", "flatten",
    "group_relation", "CombinedStep", "combined_step", "step_relation",
    "Target", "Equals", "AllFinal", "LiftsTo", "Decompose",
    "WeakStatus", "WeakResult", "Step", "weak_reach", "weak_action", "replay",
    "DerivationError", "default_horizon",
]

ZERO = Fraction(0)
# cap on the number of scheduler combinations tried before building an LP
FAST_COMBOS = 64

Relation = Iterable[tuple[Hashable, Dist]]


def group_relation(pairs: Relation) -> dict[Hashable, list[Dist]]:
    """``x -> [ν, ...]`` without duplicates, in first-seen order."""
    out: dict[Hashable, dict[Dist, None]] = defaultdict(dict)
    for x, nu in pairs:
        out[x][nu] = None
    return {x: list(ds) for x, ds in out.items()}


def _as_grouped(pairs: Relation | Mapping[Hashable, list[Dist]]) -> Mapping[Hashable, list[Dist]]:
    if isinstance(pairs, Mapping):
        return pairs
    return group_relation(pairs)


# -- lifting ---------------------------------------------------------------

@dataclass(frozen=True)
class LiftWitness:
    """Decomposition ``μ = Σ pₙ δ_{xₙ}``, ``ν = Σ pₙ νₙ`` with each ``(xₙ, νₙ)`` related."""

    rows: tuple[tuple[Fraction, Hashable, Dist], ...]

    def left(self) -> Dist:
        return Dist.combine((p, Dist.point(x)) for p, x, _ in self.rows)

    def right(self) -> Dist:
        return Dist.combine((p, nu) for p, _, nu in self.rows)

    def as_double(self) -> Dist:
        """The distribution ``Σ pₙ δ_{νₙ}`` over distributions."""
        return Dist.combine((p, Dist.point(nu)) for p, _, nu in self.rows)

    def validate(self, pairs: Relation | Mapping | None, mu: Dist, nu: Dist) -> bool:
        if not self.rows or any(p <= 0 for p, _, _ in self.rows):
            return False
        if sum(p for p, _, _ in self.rows) != 1:
            return False
        if pairs is not None:
            grouped = _as_grouped(pairs)
            if any(n not in grouped.get(x, ()) for _, x, n in self.rows):
                return False
        return self.left() == mu and self.right() == nu


@dataclass(frozen=True)
class DoubleLiftWitness:
    """Weights ``w(x, ν)`` whose rows give ``μ`` and whose columns give ``ψ``."""

    w: Mapping[tuple[Hashable, Dist], Fraction]

    def validate(self, pairs: Relation | Mapping | None, mu: Dist, psi: Dist) -> bool:
        if not self.w or any(v <= 0 for v in self.w.values()):
            return False
        if pairs is not None:
            grouped = _as_grouped(pairs)
            if any(n not in grouped.get(x, ()) for x, n in self.w):
                return False
        rows: dict[Hashable, Fraction] = defaultdict(Fraction)
        cols: dict[Dist, Fraction] = defaultdict(Fraction)
        for (x, n), v in self.w.items():
            rows[x] += v
            cols[n] += v
        return dict(rows) == dict(mu.items()) and dict(cols) == dict(psi.items())


def flatten(psi: Dist) -> Dist:
    """``π(ψ) = Σ ψ(μ)·μ`` for a distribution over distributions."""
    return Dist.combine((p, mu) for mu, p in psi.items())


def _fast_lift(grouped: Mapping[Hashable, list[Dist]], mu: Dist, nu: Dist) -> LiftWitness | None | bool:
    """Answer without an LP when every state of ``μ`` has exactly one candidate."""
    rows = []
    for x, p in mu.sorted_items():
        cands = grouped.get(x)
        if not cands:
            return None
        if len(cands) != 1:
            return False
        rows.append((p, x, cands[0]))
    w = LiftWitness(tuple(rows))
    return w if w.right() == nu else None


def check_lift(pairs: Relation | Mapping[Hashable, list[Dist]], mu: Dist, nu: Dist, *,
               certify: bool = True) -> LiftWitness | None:
    """Witness for ``μ S̄ ν``, or ``None``."""
    grouped = _as_grouped(pairs)
    quick = _fast_lift(grouped, mu, nu)
    if quick is not False:
        return quick
    target = nu.support
    lp = LinearSystem()
    cols: dict[Hashable, list[int]] = {}
    for x, p in mu.sorted_items():
        usable = [n for n in grouped.get(x, ()) if n.support <= target]
        if not usable:
            return None
        cols[x] = [lp.var((x, n)) for n in usable]
        lp.eq({v: 1 for v in cols[x]}, p)
    coeff: dict[Hashable, dict[int, Fraction]] = defaultdict(dict)
    for vs in cols.values():
        for v in vs:
            for y, q in lp.keys[v][1].items():
                coeff[y][v] = q
    for y, q in nu.items():
        lp.eq(coeff.get(y, {}), q)
    sol = lp.solve(certify_infeasible=certify)
    if sol is None:
        return None
    rows = tuple((sol[v], lp.keys[v][0], lp.keys[v][1]) for v in sorted(sol))
    return LiftWitness(rows)


def check_double_lift(pairs: Relation | Mapping[Hashable, list[Dist]], mu: Dist,
                      psi: Dist) -> DoubleLiftWitness | None:
    """Witness for ``μ S̿ ψ`` where ``ψ`` is a distribution over distributions."""
    grouped = _as_grouped(pairs)
    lp = LinearSystem()
    by_col: dict[Dist, dict[int, int]] = defaultdict(dict)
    for x, p in mu.sorted_items():
        related = set(grouped.get(x, ()))
        vs = [lp.var((x, n)) for n, _ in psi.sorted_items() if n in related]
        if not vs:
            return None
        lp.eq({v: 1 for v in vs}, p)
        for v in vs:
            by_col[lp.keys[v][1]][v] = 1
    for n, q in psi.items():
        lp.eq(by_col.get(n, {}), q)
    sol = lp.solve()
    if sol is None:
        return None
    return DoubleLiftWitness({lp.keys[v]: val for v, val in sol.items()})


# -- combined steps ----------------------------------------------------------

def _unobservable(p: ProbAutomaton, a: str | None) -> bool:
    return a is None or p.alphabet.is_unobservable(a)


def _moves(p: ProbAutomaton, x: Hashable, a: str | None) -> list[Transition]:
    if a is None:
        return [t for t in p.out(x) if p.alphabet.is_unobservable(t.action)]
    return [t for t in p.out(x) if t.action == a]


def _choices(p: ProbAutomaton, x: Hashable, a: str | None) -> list[Dist]:
    ds = [t.target for t in _moves(p, x, a)]
    if _unobservable(p, a):
        ds.insert(0, Dist.point(x))
    return list(dict.fromkeys(ds))


def step_relation(p: ProbAutomaton, a: str | None, states: Iterable[Hashable] | None = None
                  ) -> dict[Hashable, list[Dist]]:
    """``x -> successor distributions`` for one ``a`` step.

    ``a=None`` stands for one step of any unobservable action; unobservable
    steps include staying put.
    """
    return {x: _choices(p, x, a) for x in (p.states if states is None else states)}


class CombinedStep:
    """All ``ν′`` with ``ν →ā ν′``: per state of ``ν`` a convex choice of successors."""

    def __init__(self, p: ProbAutomaton, nu: Dist, a: str | None):
        self.source = nu
        self.action = a
        self.choices = step_relation(p, a, nu.support)

    @property
    def empty(self) -> bool:
        return any(not ds for ds in self.choices.values())

    def contains(self, mu: Dist) -> LiftWitness | None:
        if self.empty:
            return None
        return check_lift(self.choices, self.source, mu)

    def vertices(self) -> Iterable[tuple[Dist, LiftWitness]]:
        """Deterministic schedulers: one successor per state."""
        if self.empty:
            return
        xs = [x for x, _ in self.source.sorted_items()]
        for pick in itertools.product(*(self.choices[x] for x in xs)):
            rows = tuple((self.source[x], x, d) for x, d in zip(xs, pick))
            w = LiftWitness(rows)
            yield w.right(), w

    def n_vertices(self) -> int:
        n = 1
        for ds in self.choices.values():
            n *= len(ds)
        return n


def combined_step(p: ProbAutomaton, nu: Dist, a: str | None) -> CombinedStep:
    return CombinedStep(p, nu, a)


# -- target predicates -------------------------------------------------------

class Target:
    """Linear condition on the distribution reached by a weak transition."""

    def stop_states(self, region: Iterable[Hashable]) -> list[Hashable]:
        return sorted(region)

    def attach(self, lp: LinearSystem, stop: Mapping[Hashable, int]) -> Any:
        return None

    def extract(self, lp: LinearSystem, ctx: Any, sol: Mapping[int, Fraction]) -> Any:
        return True

    def holds(self, d: Dist) -> Any:
        raise NotImplementedError


class Equals(Target):
    def __init__(self, dist: Dist):
        self.dist = dist

    def attach(self, lp, stop):
        if not self.dist.support <= stop.keys():
            lp.trivially_infeasible = True
        for y, v in stop.items():
            lp.eq({v: 1}, self.dist.get(y))

    def holds(self, d):
        return d == self.dist or None

    def __repr__(self):
        return f"Equals({self.dist!r})"


class AllFinal(Target):
    """All mass on final states."""

    def __init__(self, finals: Iterable[Hashable]):
        self.finals = frozenset(finals)

    def stop_states(self, region):
        return sorted(set(region) & self.finals)

    def holds(self, d):
        return d.support <= self.finals or None

    def __repr__(self):
        return "AllFinal()"


class LiftsTo(Target):
    """Reached ``ν′`` satisfies ``μ′ S̄ ν′``; the extracted value is the ``LiftWitness``."""

    def __init__(self, pairs: Relation | Mapping[Hashable, list[Dist]], mu: Dist):
        self.pairs = _as_grouped(pairs)
        self.mu = mu

    def attach(self, lp, stop):
        cols = []
        into: dict[Hashable, dict[int, Fraction]] = defaultdict(dict)
        for x, p in self.mu.sorted_items():
            vs = [lp.var(("lift", x, n)) for n in self.pairs.get(x, ()) if n.support <= stop.keys()]
            if not vs:
                lp.trivially_infeasible = True
                return cols
            lp.eq({v: 1 for v in vs}, p)
            for v in vs:
                for y, q in lp.keys[v][2].items():
                    into[y][v] = -q
            cols.extend(vs)
        for y, s in stop.items():
            lp.eq({s: 1, **into.get(y, {})}, 0)
        return cols

    def extract(self, lp, cols, sol):
        return LiftWitness(tuple((sol[v], lp.keys[v][1], lp.keys[v][2]) for v in cols if sol.get(v)))

    def holds(self, d):
        return check_lift(self.pairs, self.mu, d)

    def __repr__(self):
        return f"LiftsTo({self.mu!r})"


class Decompose(Target):
    """Reached ``ν′`` splits as ``Σ_x μ′(x)·νₓ`` with ``supp νₓ ⊆ compat(x)``.

    The extracted value maps each ``x`` to its ``νₓ``.
    """

    def __init__(self, mu: Dist, compat: Callable[[Hashable], Iterable[Hashable]] | Mapping):
        self.mu = mu
        self.compat = compat if callable(compat) else (lambda x, m=compat: m.get(x, ()))

    def attach(self, lp, stop):
        cols = []
        into: dict[Hashable, dict[int, Fraction]] = defaultdict(dict)
        for x, p in self.mu.sorted_items():
            ok = set(self.compat(x))
            vs = [lp.var(("dec", x, y)) for y in stop if y in ok]
            if not vs:
                lp.trivially_infeasible = True
                return cols
            lp.eq({v: 1 for v in vs}, p)
            for v in vs:
                into[lp.keys[v][2]][v] = -1
            cols.extend(vs)
        for y, s in stop.items():
            lp.eq({s: 1, **into.get(y, {})}, 0)
        return cols

    def holds(self, d):
        lp = LinearSystem()
        stop = {y: lp.var(("stop", y)) for y in sorted(d.support)}
        for y, v in stop.items():
            lp.eq({v: 1}, d[y])
        cols = self.attach(lp, stop)
        sol = lp.solve()
        if sol is None:
            return None
        return self.extract(lp, cols, sol)

    def extract(self, lp, cols, sol):
        parts: dict[Hashable, dict[Hashable, Fraction]] = defaultdict(dict)
        for v in cols:
            if sol.get(v):
                _, x, y = lp.keys[v]
                parts[x][y] = sol[v] / self.mu[x]
        return {x: Dist(ws) for x, ws in parts.items()}

    def __repr__(self):
        return f"Decompose({self.mu!r})"


# -- weak transitions --------------------------------------------------------

class DerivationError(ValueError):
    """A weak-transition derivation does not replay."""


class WeakStatus(enum.Enum):
    REACHED = "reached"
    UNREACHABLE = "unreachable"
    HORIZON_EXHAUSTED = "horizon-exhausted"


@dataclass(frozen=True)
class Step:
    """One lifted step ``source →ā target``; ``action=None`` is an unobservable step."""

    action: str | None
    source: Dist
    target: Dist
    lift: LiftWitness


@dataclass(frozen=True)
class WeakResult:
    status: WeakStatus
    target: Dist | None = None
    derivation: tuple[Step, ...] = ()
    witness: Any = None
    reason: str = ""

    @property
    def reached(self) -> bool:
        return self.status is WeakStatus.REACHED

    def __bool__(self) -> bool:
        return self.reached


def default_horizon(p: ProbAutomaton) -> int:
    return 2 * len(p.states)


def _closure(p: ProbAutomaton, start: Iterable[Hashable]) -> list[Hashable]:
    seen = set(start)
    todo = deque(seen)
    while todo:
        x = todo.popleft()
        for t in _moves(p, x, None):
            for y in t.target.support:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    return sorted(seen)


def _reached(final: Dist, steps: list[Step], witness: Any) -> WeakResult:
    return WeakResult(WeakStatus.REACHED, final, tuple(steps), witness)


def _fast_path(p: ProbAutomaton, nu: Dist, a: str | None, target: Target) -> WeakResult | None:
    """Try zero steps (unobservable) or one combined step with a deterministic scheduler."""
    if a is None:
        w = target.holds(nu)
        if w:
            return _reached(nu, [], w)
    cs = CombinedStep(p, nu, a)
    if cs.empty or cs.n_vertices() > FAST_COMBOS:
        return None
    for d, lift in cs.vertices():
        if a is None and d == nu:
            continue
        w = target.holds(d)
        if w:
            return _reached(d, [Step(a, nu, d, lift)], w)
    return None


def _layers(start: Dist, flows: Mapping[Transition, Fraction]) -> list[Step] | None:
    """Turn an acyclic unobservable flow into lifted steps; ``None`` if the flow has a cycle.

    A state fires all of its outgoing flow at once, at its longest-path depth,
    so every predecessor has already delivered its mass by then.
    """
    out: dict[Hashable, list[tuple[Transition, Fraction]]] = defaultdict(list)
    for t, f in flows.items():
        if f:
            out[t.source].append((t, f))
    succ = {x: {y for t, _ in ts for y in t.target.support} for x, ts in out.items()}
    indeg: dict[Hashable, int] = defaultdict(int)
    for x, ys in succ.items():
        for y in ys:
            indeg[y] += 1
    nodes = set(succ) | {y for ys in succ.values() for y in ys}
    depth = {x: 0 for x in nodes}
    ready = deque(sorted((x for x in nodes if not indeg[x]), key=repr))
    done = 0
    while ready:
        x = ready.popleft()
        done += 1
        for y in succ.get(x, ()):
            depth[y] = max(depth[y], depth[x] + 1)
            indeg[y] -= 1
            if not indeg[y]:
                ready.append(y)
    if done != len(nodes):
        return None
    steps: list[Step] = []
    cur = start
    last = max((depth[x] for x in out), default=-1)
    for k in range(last + 1):
        rows = []
        for x, m in cur.sorted_items():
            if x in out and depth[x] == k:
                sent = ZERO
                for t, f in out[x]:
                    rows.append((f, x, t.target))
                    sent += f
                if m - sent < 0:
                    raise AssertionError("flow exceeds available mass")
                if m - sent:
                    rows.append((m - sent, x, Dist.point(x)))
            else:
                rows.append((m, x, Dist.point(x)))
        lift = LiftWitness(tuple(rows))
        nxt = lift.right()
        if nxt != cur:
            steps.append(Step(None, cur, nxt, lift))
        cur = nxt
    return steps


class _FlowProblem:
    """Untimed flow relaxation of ``ν ⟹ [→a ⟹] ν′`` with a target on ``ν′``.

    Any finite derivation induces a feasible flow, so infeasibility is a proof
    of unreachability.  A feasible flow whose support graph is acyclic is
    turned back into a derivation.
    """

    def __init__(self, p: ProbAutomaton, nu: Dist, a: str | None, target: Target):
        self.p, self.nu, self.a, self.target = p, nu, a, target
        lp = self.lp = LinearSystem()
        region1 = _closure(p, nu.support)
        self.f1: dict[Transition, int] = {}
        self.g: dict[Transition, int] = {}
        self.f2: dict[Transition, int] = {}
        if a is None:
            self.stop = self._phase(region1, {y: {} for y in region1}, nu, self.f1, final=True)
        else:
            for y in region1:
                for t in _moves(p, y, a):
                    self.g[t] = lp.var(("g", t), 1.0)
            region2 = _closure(p, {y for t in self.g for y in t.target.support})
            src: dict[Hashable, dict[int, Fraction]] = {y: {} for y in region2}
            for t, v in self.g.items():
                for y, q in t.target.items():
                    src[y][v] = -q
            extra = {y: {} for y in region1}
            for t, v in self.g.items():
                extra[t.source][v] = Fraction(1)
            self._phase(region1, extra, nu, self.f1, final=False)
            self.stop = self._phase(region2, src, None, self.f2, final=True)
        self.ctx = target.attach(lp, self.stop)

    def _phase(self, region, extra, nu, flows, final):
        lp = self.lp
        for y in region:
            for t in _moves(self.p, y, None):
                flows[t] = lp.var(("f", t), 1.0)
        stop = {}
        if final:
            stop = {y: lp.var(("stop", y)) for y in self.target.stop_states(region)}
        rows: dict[Hashable, dict[int, Fraction]] = {y: dict(extra.get(y, {})) for y in region}
        for t, v in flows.items():
            rows[t.source][v] = rows[t.source].get(v, ZERO) + 1
            for y, q in t.target.items():
                rows[y][v] = rows[y].get(v, ZERO) - q
        for y, v in stop.items():
            rows[y][v] = Fraction(1)
        for y in region:
            lp.eq(rows[y], nu.get(y) if nu is not None else 0)
        return stop

    def solve(self, certify: bool) -> tuple[str, Any]:
        sol = self.lp.solve(certify_infeasible=certify)
        if sol is None:
            return "infeasible", None
        val = lambda v: sol.get(v, ZERO)  # noqa: E731
        steps = _layers(self.nu, {t: val(v) for t, v in self.f1.items()})
        if steps is None:
            return "cyclic", None
        cur = steps[-1].target if steps else self.nu
        if self.a is not None:
            rows = tuple((val(v), t.source, t.target) for t, v in self.g.items() if val(v))
            lift = LiftWitness(rows)
            nxt = lift.right()
            steps.append(Step(self.a, cur, nxt, lift))
            more = _layers(nxt, {t: val(v) for t, v in self.f2.items()})
            if more is None:
                return "cyclic", None
            steps.extend(more)
            cur = more[-1].target if more else nxt
        return "ok", (cur, steps, self.target.extract(self.lp, self.ctx, sol))


def _timed(p: ProbAutomaton, nu: Dist, a: str | None, target: Target, horizon: int,
           certify: bool) -> WeakResult | None:
    """Layered LP: ``horizon`` unobservable steps, then ``a`` and ``horizon`` more steps."""
    kinds = [None] * horizon
    if a is not None:
        kinds += [a] + [None] * horizon
    before = set(_closure(p, nu.support))
    region = set(before)
    if a is not None:
        region |= set(_closure(p, {y for x in before for t in _moves(p, x, a)
                                   for y in t.target.support}))
    region = sorted(region)
    lp = LinearSystem()
    incoming: dict[Hashable, dict[int, Fraction]] = {y: {} for y in region}
    const = {y: nu.get(y) for y in region}
    layers = []
    for kind in kinds:
        moves = {}
        stays = {}
        nxt: dict[Hashable, dict[int, Fraction]] = {y: {} for y in region}
        for y in region:
            row = {v: -c for v, c in incoming[y].items()}
            # the visible step can only fire from where the first phase ends
            fire = kind is None or y in before
            for t in _moves(p, y, kind) if fire else ():
                v = moves[t] = lp.var(("m", t), 1.0)
                row[v] = Fraction(1)
                for z, q in t.target.items():
                    nxt[z][v] = nxt[z].get(v, ZERO) + q
            if kind is None or p.alphabet.is_unobservable(kind):
                v = stays[y] = lp.var(("s", y))
                row[v] = Fraction(1)
                nxt[y][v] = nxt[y].get(v, ZERO) + 1
            lp.eq(row, const[y])
        layers.append((kind, moves, stays))
        incoming = nxt
        const = {y: ZERO for y in region}
    allowed = target.stop_states(region)
    stop = {y: lp.var(("stop", y)) for y in allowed}
    for y in region:
        row = {v: -c for v, c in incoming[y].items()}
        if y in stop:
            row[stop[y]] = Fraction(1)
        lp.eq(row, const[y])
    ctx = target.attach(lp, stop)
    sol = lp.solve(certify_infeasible=certify)
    if sol is None:
        return None
    val = lambda v: sol.get(v, ZERO)  # noqa: E731
    cur = nu
    steps = []
    for kind, moves, stays in layers:
        rows = [(val(v), t.source, t.target) for t, v in moves.items() if val(v)]
        rows += [(val(v), y, Dist.point(y)) for y, v in stays.items() if val(v)]
        lift = LiftWitness(tuple(rows))
        nxt = lift.right()
        if kind is not None or nxt != cur:
            steps.append(Step(kind, cur, nxt, lift))
        cur = nxt
    return _reached(cur, steps, target.extract(lp, ctx, sol))


def _count_unobservable_runs(steps: Iterable[Step]) -> int:
    """Longest run of consecutive unobservable steps."""
    best = run = 0
    for s in steps:
        run = run + 1 if s.action is None else 0
        best = max(best, run)
    return best


def _weak(p: ProbAutomaton, nu: Dist, a: str | None, target: Target,
          horizon: int | None, certify: bool, fast: bool) -> WeakResult:
    if horizon is None:
        horizon = default_horizon(p)
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if fast:
        hit = _fast_path(p, nu, a, target)
        if hit is not None:
            return hit
    status, data = _FlowProblem(p, nu, a, target).solve(certify)
    if status == "infeasible":
        return WeakResult(WeakStatus.UNREACHABLE, reason="flow relaxation infeasible")
    if status == "ok":
        final, steps, witness = data
        if _count_unobservable_runs(steps) <= horizon:
            return _reached(final, steps, witness)
    # a timed failure only means "not within h layers", so it needs no certificate;
    # feasibility is monotone in h, so deepening gives the same answer sooner
    h = min(2, horizon)
    while True:
        hit = _timed(p, nu, a, target, h, certify=False)
        if hit is not None:
            return hit
        if h >= horizon:
            break
        h = min(2 * h, horizon)
    return WeakResult(WeakStatus.HORIZON_EXHAUSTED,
                      reason=f"no derivation within {horizon} unobservable steps per phase")


def weak_reach(p: ProbAutomaton, nu: Dist, target: Target, horizon: int | None = None, *,
               certify: bool = True, fast: bool = True) -> WeakResult:
    """Search ``ν ⟹ ν′`` with ``ν′`` satisfying ``target``.

    ``horizon`` bounds the number of consecutive unobservable lifted steps
    (default twice the number of states).  ``Unreachable`` is exact; when the
    only flows found circulate through unobservable cycles and no derivation
    fits the horizon the result is ``HorizonExhausted``.  With
    ``certify=False`` a floating-point infeasibility verdict is accepted.
    """
    return _weak(p, nu, None, target, horizon, certify, fast)


def weak_action(p: ProbAutomaton, nu: Dist, a: str, target: Target, horizon: int | None = None,
                *, certify: bool = True, fast: bool = True) -> WeakResult:
    """Search ``ν ⟹ →ā ⟹ ν′``; for an unobservable ``a`` this is :func:`weak_reach`."""
    if a not in p.alphabet.actions_tau:
        raise ValueError(f"unknown action {a!r}")
    if p.alphabet.is_unobservable(a):
        return _weak(p, nu, None, target, horizon, certify, fast)
    return _weak(p, nu, a, target, horizon, certify, fast)


def replay(p: ProbAutomaton, nu: Dist, a: str | None, result: WeakResult,
           target: Target | None = None) -> None:
    """Re-execute a derivation step by step; raise ``DerivationError`` on any mismatch."""
    if not result.reached:
        raise DerivationError(f"nothing to replay: {result.status.value}")
    if a is not None and p.alphabet.is_unobservable(a):
        a = None
    cur = nu
    seen_a = 0
    for i, st in enumerate(result.derivation):
        if st.source != cur:
            raise DerivationError(f"step {i} starts from {st.source!r}, expected {cur!r}")
        if st.action is not None:
            if st.action != a:
                raise DerivationError(f"step {i} takes {st.action!r}, expected only {a!r}")
            seen_a += 1
        rel = step_relation(p, st.action, st.source.support)
        if not st.lift.validate(rel, st.source, st.target):
            raise DerivationError(f"step {i} is not a combined {st.action or 'unobservable'} step")
        cur = st.target
    if seen_a != (0 if a is None else 1):
        raise DerivationError(f"derivation takes {a!r} {seen_a} times")
    if cur != result.target:
        raise DerivationError("derivation ends elsewhere than the reported target")
    if target is not None and not target.holds(cur):
        raise DerivationError(f"reached distribution violates {target!r}")
