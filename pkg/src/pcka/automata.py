"""Probabilistic automata and the algebraic operator constructions.

An automaton has states, action-labelled transitions into distributions, an
initial distribution and a set of final states.  Every construction below
returns a new immutable automaton whose states are fresh integers, so operands
never share states with the result, and records how operand states were
renamed (``maps``) so that callers can locate "copies" of operand states.
"""

from __future__ import annotations

import itertools
import threading
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any

from .dist import Dist, as_fraction

__all__ = [
    "TAU", "ActionAlphabet", "AutomatonError", "Transition", "ProbAutomaton",
    "StateIdAllocator", "fresh_id", "deadlock", "skip", "action", "plus", "seq",
    "star", "pchoice", "par", "run", "reachable", "unfold", "validate",
    "embedding", "rename",
]

TAU = "tau"


class AutomatonError(ValueError):
    """Invalid automaton or invalid operands to a construction."""


def _is_identifier(name: str) -> bool:
    return bool(name) and (name[0].isalpha() or name[0] == "_") and all(
        c.isalnum() or c in "_'" for c in name)


@dataclass(frozen=True)
class ActionAlphabet:
    """External and internal action names; ``tau`` is implicit and reserved."""

    external: frozenset[str]
    internal: frozenset[str] = frozenset()

    def __init__(self, external: Iterable[str], internal: Iterable[str] = ()):
        ext, inn = frozenset(external), frozenset(internal)
        object.__setattr__(self, "external", ext)
        object.__setattr__(self, "internal", inn)
        if ext & inn:
            raise AutomatonError(f"actions both external and internal: {sorted(ext & inn)}")
        if TAU in ext | inn:
            raise AutomatonError("'tau' is reserved for the silent action")
        for a in ext | inn:
            if not isinstance(a, str) or not _is_identifier(a):
                raise AutomatonError(f"bad action name {a!r}")

    @property
    def actions(self) -> frozenset[str]:
        return self.external | self.internal

    @property
    def actions_tau(self) -> frozenset[str]:
        return self.external | self.internal | {TAU}

    def is_unobservable(self, a: str) -> bool:
        return a == TAU or a in self.internal

    def __repr__(self) -> str:
        return f"ActionAlphabet(external={sorted(self.external)}, internal={sorted(self.internal)})"


class StateIdAllocator:
    """Thread-safe monotone source of fresh state ids."""

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)
        self._lock = threading.Lock()

    def __call__(self) -> int:
        with self._lock:
            return next(self._counter)


fresh_id = StateIdAllocator()


@dataclass(frozen=True)
class Transition:
    source: int
    action: str
    target: Dist


class ProbAutomaton:
    """Immutable finite probabilistic automaton.

    Provenance attributes (all optional):

    ``parts``/``maps``
        operand automata and, per operand, the renaming ``operand state -> state``.
    ``fresh``
        named states introduced by the construction (e.g. ``{"z": 17}``).
    ``pairs``
        for products, ``state -> (left state, right state)``.
    ``paths``
        for unfoldings, ``state -> path tuple``.
    """

    def __init__(self, states: Iterable[int], alphabet: ActionAlphabet,
                 transitions: Iterable[Transition], initial: Dist,
                 finals: Iterable[int] = (), *, names: Mapping[int, str] | None = None,
                 parts: tuple = (), maps: tuple = (), fresh: Mapping[str, int] | None = None,
                 pairs: Mapping[int, tuple[int, int]] | None = None,
                 paths: Mapping[int, tuple] | None = None, name: str | None = None,
                 check: bool = True):
        self.states = frozenset(states)
        self.alphabet = alphabet
        self.transitions = tuple(dict.fromkeys(transitions))
        self.initial = initial
        self.finals = frozenset(finals)
        self.names = dict(names) if names else {}
        self.parts = tuple(parts)
        self.maps = tuple(maps)
        self.fresh = dict(fresh) if fresh else {}
        self.pairs = dict(pairs) if pairs else {}
        self.paths = dict(paths) if paths else {}
        self.name = name
        self._out: dict[int, tuple[Transition, ...]] | None = None
        self._pair_index: dict[tuple[int, int], int] | None = None
        if check:
            validate(self)

    def out(self, state: int) -> tuple[Transition, ...]:
        if self._out is None:
            out: dict[int, list[Transition]] = {s: [] for s in self.states}
            for t in self.transitions:
                out[t.source].append(t)
            self._out = {s: tuple(ts) for s, ts in out.items()}
        return self._out.get(state, ())

    @property
    def pair_index(self) -> dict[tuple[int, int], int]:
        if self._pair_index is None:
            self._pair_index = {xy: s for s, xy in self.pairs.items()}
        return self._pair_index

    def label(self, state: int) -> str:
        return self.names.get(state, f"x{state}")

    def state_by_label(self, label: str) -> int:
        for s in self.states:
            if self.label(s) == label:
                return s
        raise KeyError(label)

    def __len__(self) -> int:
        return len(self.states)

    def __repr__(self) -> str:
        nm = f" {self.name}" if self.name else ""
        return (f"<ProbAutomaton{nm}: {len(self.states)} states, "
                f"{len(self.transitions)} transitions, {len(self.finals)} finals>")


def validate(p: ProbAutomaton) -> None:
    """Raise ``AutomatonError`` unless ``p`` satisfies the automaton invariants."""
    states = p.states
    if not states:
        raise AutomatonError("automaton has no states")
    if not p.initial.support <= states:
        raise AutomatonError("initial distribution mentions unknown states")
    if sum(p.initial.values()) != 1:
        raise AutomatonError("initial distribution does not sum to 1")
    if not p.finals <= states:
        raise AutomatonError("final states are not states")
    sigma = p.alphabet.actions_tau
    for t in p.transitions:
        if t.source not in states:
            raise AutomatonError(f"transition from unknown state {t.source}")
        if t.action not in sigma:
            raise AutomatonError(f"transition action {t.action!r} not in alphabet")
        if not t.target.support <= states:
            raise AutomatonError(f"transition target outside state space: {t}")
        if sum(t.target.values()) != 1:
            raise AutomatonError(f"transition target does not sum to 1: {t}")


def rename(p: ProbAutomaton) -> tuple[dict[int, int], frozenset[int], list[Transition], Dist, frozenset[int]]:
    """Fresh copy of ``p``'s parts: ``(map, states, transitions, initial, finals)``."""
    m = {s: fresh_id() for s in sorted(p.states)}
    trans = [Transition(m[t.source], t.action, t.target.map(m.__getitem__)) for t in p.transitions]
    return (m, frozenset(m.values()), trans, p.initial.map(m.__getitem__),
            frozenset(m[f] for f in p.finals))


def _carry_names(*pairs: tuple[ProbAutomaton, dict[int, int]]) -> dict[int, str]:
    names: dict[int, str] = {}
    for p, m in pairs:
        for s, n in p.names.items():
            names[m[s]] = n
    return names


def _same_alphabet(p: ProbAutomaton, q: ProbAutomaton) -> None:
    if p.alphabet != q.alphabet:
        raise AutomatonError(f"alphabet mismatch: {p.alphabet} vs {q.alphabet}")


def deadlock(alphabet: ActionAlphabet) -> ProbAutomaton:
    x = fresh_id()
    return ProbAutomaton([x], alphabet, [], Dist.point(x), [], name="0")


def skip(alphabet: ActionAlphabet) -> ProbAutomaton:
    x = fresh_id()
    return ProbAutomaton([x], alphabet, [], Dist.point(x), [x], name="1")


def action(a: str, alphabet: ActionAlphabet) -> ProbAutomaton:
    if a not in alphabet.actions:
        raise AutomatonError(f"unknown action {a!r}")
    x, x1 = fresh_id(), fresh_id()
    return ProbAutomaton([x, x1], alphabet, [Transition(x, a, Dist.point(x1))],
                         Dist.point(x), [x1], name=a)


def plus(p: ProbAutomaton, q: ProbAutomaton) -> ProbAutomaton:
    """Nondeterministic choice: a fresh state with a tau move into each initial distribution."""
    _same_alphabet(p, q)
    mp, sp, tp, ip, fp = rename(p)
    mq, sq, tq, iq, fq = rename(q)
    z = fresh_id()
    trans = tp + tq + [Transition(z, TAU, ip), Transition(z, TAU, iq)]
    return ProbAutomaton(sp | sq | {z}, p.alphabet, trans, Dist.point(z), fp | fq,
                         names=_carry_names((p, mp), (q, mq)), parts=(p, q), maps=(mp, mq),
                         fresh={"z": z})


def seq(p: ProbAutomaton, q: ProbAutomaton) -> ProbAutomaton:
    """Sequential composition: every final state of ``p`` moves silently into ``q``."""
    _same_alphabet(p, q)
    mp, sp, tp, ip, fp = rename(p)
    mq, sq, tq, iq, fq = rename(q)
    trans = tp + tq + [Transition(x, TAU, iq) for x in sorted(fp)]
    return ProbAutomaton(sp | sq, p.alphabet, trans, ip, fq,
                         names=_carry_names((p, mp), (q, mq)), parts=(p, q), maps=(mp, mq))


def star(p: ProbAutomaton) -> ProbAutomaton:
    """Kleene star (tail iteration) around a fresh final state."""
    mp, sp, tp, ip, fp = rename(p)
    z = fresh_id()
    trans = tp + [Transition(z, TAU, ip)] + [Transition(x, TAU, Dist.point(z)) for x in sorted(fp)]
    return ProbAutomaton(sp | {z}, p.alphabet, trans, Dist.point(z), [z],
                         names=_carry_names((p, mp)), parts=(p,), maps=(mp,), fresh={"z": z})


def pchoice(p: ProbAutomaton, prob: Any, q: ProbAutomaton) -> ProbAutomaton:
    """Probabilistic choice: blend the initial distributions with weight ``prob`` on ``p``.

    For ``prob`` in {0, 1} the other operand is kept but is unreachable.
    """
    prob = as_fraction(prob)
    if not 0 <= prob <= 1:
        raise AutomatonError(f"probability {prob} outside [0,1]")
    _same_alphabet(p, q)
    mp, sp, tp, ip, fp = rename(p)
    mq, sq, tq, iq, fq = rename(q)
    init = Dist.combine([(prob, ip), (1 - prob, iq)])
    return ProbAutomaton(sp | sq, p.alphabet, tp + tq, init, fp | fq,
                         names=_carry_names((p, mp), (q, mq)), parts=(p, q), maps=(mp, mq))


def par(p: ProbAutomaton, frame: Iterable[str], q: ProbAutomaton) -> ProbAutomaton:
    """CSP-style parallel composition synchronising on ``frame``.

    States are all pairs of operand states; ``pairs`` maps each product state
    back to its operand states.
    """
    _same_alphabet(p, q)
    frame = frozenset(frame)
    if not frame <= p.alphabet.external:
        raise AutomatonError(f"frame must contain external actions only: {sorted(frame)}")
    idx = {(x, y): fresh_id() for x in sorted(p.states) for y in sorted(q.states)}
    key = idx.__getitem__
    trans: list[Transition] = []
    for (x, y), s in idx.items():
        for t in p.out(x):
            if t.action in frame:
                for u in q.out(y):
                    if u.action == t.action:
                        trans.append(Transition(s, t.action, t.target.product(u.target).map(key)))
            else:
                trans.append(Transition(s, t.action, t.target.product(Dist.point(y)).map(key)))
        for u in q.out(y):
            if u.action not in frame:
                trans.append(Transition(s, u.action, Dist.point(x).product(u.target).map(key)))
    init = p.initial.product(q.initial).map(key)
    finals = [idx[(x, y)] for x in p.finals for y in q.finals]
    names = {s: f"({p.label(x)},{q.label(y)})" for (x, y), s in idx.items()
             if x in p.names or y in q.names}
    return ProbAutomaton(idx.values(), p.alphabet, trans, init, finals, names=names,
                         parts=(p, q), pairs={s: xy for xy, s in idx.items()})


def run(actions: Iterable[str], alphabet: ActionAlphabet) -> ProbAutomaton:
    """Iterated nondeterministic choice over ``actions`` (must be external, nonempty)."""
    acts = sorted(set(actions))
    if not acts:
        raise AutomatonError("run() needs a nonempty action set")
    if not set(acts) <= alphabet.external:
        raise AutomatonError(f"run() actions must be external: {acts}")
    body = reduce(plus, [action(a, alphabet) for a in acts])
    r = star(body)
    r.name = "run{" + ",".join(acts) + "}"
    return r


def reachable(p: ProbAutomaton) -> ProbAutomaton:
    """Restriction to states reachable from the initial support (ids are kept)."""
    seen = set(p.initial.support)
    todo = deque(sorted(seen))
    while todo:
        s = todo.popleft()
        for t in p.out(s):
            for y in t.target.support:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    if seen == p.states:
        return p
    trans = [t for t in p.transitions if t.source in seen]
    names = {s: n for s, n in p.names.items() if s in seen}
    pairs = {s: xy for s, xy in p.pairs.items() if s in seen}
    paths = {s: a for s, a in p.paths.items() if s in seen}
    return ProbAutomaton(seen, p.alphabet, trans, p.initial, p.finals & seen, names=names,
                         parts=(p,), maps=({s: s for s in seen},), pairs=pairs, paths=paths,
                         name=p.name, check=False)


def unfold(p: ProbAutomaton, depth: int) -> ProbAutomaton:
    """Path automaton of ``p`` truncated after ``depth`` transitions.

    States are finite paths ``(x0, a1, x1, ...)`` starting in the initial
    support; a path of length ``depth`` has no outgoing transitions.
    """
    if depth < 0:
        raise AutomatonError("depth must be nonnegative")
    ids: dict[tuple, int] = {}

    def sid(path: tuple) -> int:
        if path not in ids:
            ids[path] = fresh_id()
        return ids[path]

    init = p.initial.map(lambda x: sid((x,)))
    trans: list[Transition] = []
    frontier = sorted(ids)
    for _ in range(depth):
        nxt = []
        for path in frontier:
            for t in p.out(path[-1]):
                tgt = t.target.map(lambda x, path=path, a=t.action: sid(path + (a, x)))
                trans.append(Transition(ids[path], t.action, tgt))
                nxt.extend(path + (t.action, x) for x in sorted(t.target.support))
        frontier = list(dict.fromkeys(nxt))
    finals = [s for path, s in ids.items() if path[-1] in p.finals]
    names = {s: "/".join(str(p.label(e)) if i % 2 == 0 else e for i, e in enumerate(path))
             for path, s in ids.items()}
    return ProbAutomaton(ids.values(), p.alphabet, trans, init, finals, names=names,
                         parts=(p,), paths={s: path for path, s in ids.items()})


def embedding(a: ProbAutomaton, *path: int) -> dict[int, int]:
    """Map from the states of the operand at ``path`` into the states of ``a``.

    ``embedding(a, 1, 0)`` follows ``a.parts[1].parts[0]``.  Only renaming
    constructions (not products) can be traversed.
    """
    result: dict[int, int] | None = None
    node = a
    for i in path:
        if i >= len(node.maps):
            raise AutomatonError("provenance missing: cannot locate operand copy")
        m = node.maps[i]
        result = dict(m) if result is None else {s: result[t] for s, t in m.items() if t in result}
        node = node.parts[i]
    if result is None:
        return {s: s for s in a.states}
    return result

