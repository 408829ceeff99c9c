"""Line-oriented text formats for automata and simulation relations.

Automaton::

    automaton NAME
    external a b c
    internal stuck
    states s0 s1 s2
    init s0:1
    final s2
    trans s0 coin -> s1:1/5 s2:4/5

Relation::

    relation NAME from LEFT to RIGHT
    pair s1 ~ u0:1/5 u1:4/5

Probabilities are exact (``num/den`` or an integer).  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from fractions import Fraction

from .automata import TAU, ActionAlphabet, AutomatonError, ProbAutomaton, Transition, fresh_id
from .dist import Dist, DistError
from .simulation import SimRelation

__all__ = ["FormatError", "dump_automaton", "load_automaton", "dump_relation", "load_relation",
           "state_labels"]

_LABEL = re.compile(r"[^\s:#]+")


class FormatError(ValueError):
    def __init__(self, msg: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


def state_labels(p: ProbAutomaton) -> dict[int, str]:
    """Printable, unique labels; other states get ``x<i>`` by their position in id order."""
    out = {}
    used: set[str] = set()
    named = [s for s in sorted(p.states) if s in p.names]
    for s in named:
        lab = p.names[s]
        if _LABEL.fullmatch(lab) and lab not in used and lab != "->" and lab != "~":
            out[s] = lab
            used.add(lab)
    for i, s in enumerate(sorted(p.states)):
        if s not in out:
            lab = f"x{i}"
            while lab in used:
                lab += "_"
            out[s] = lab
            used.add(lab)
    return out


def _fmt(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def _dist(d: Dist, lab: dict) -> str:
    return " ".join(f"{lab[x]}:{_fmt(w)}" for x, w in sorted(d.items(), key=lambda kv: kv[0]))


def dump_automaton(p: ProbAutomaton, name: str | None = None) -> str:
    lab = state_labels(p)
    order = sorted(p.states)
    lines = [f"automaton {name or p.name or 'A'}",
             "external " + " ".join(sorted(p.alphabet.external))]
    if p.alphabet.internal:
        lines.append("internal " + " ".join(sorted(p.alphabet.internal)))
    lines.append("states " + " ".join(lab[s] for s in order))
    lines.append("init " + _dist(p.initial, lab))
    if p.finals:
        lines.append("final " + " ".join(lab[s] for s in order if s in p.finals))
    for t in sorted(p.transitions, key=lambda t: (t.source, t.action, sorted(t.target.items()))):
        lines.append(f"trans {lab[t.source]} {t.action} -> {_dist(t.target, lab)}")
    return "\n".join(lines) + "\n"


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for n, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if words:
            yield n, words


def _parse_dist(words: Iterable[str], ids: dict[str, int], line: int) -> Dist:
    w = {}
    for item in words:
        label, sep, prob = item.rpartition(":")
        if not sep or not label:
            raise FormatError(f"expected STATE:PROB, found {item!r}", line)
        if label not in ids:
            raise FormatError(f"unknown state {label!r}", line)
        try:
            q = Fraction(prob)
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"bad probability {prob!r}", line) from None
        if "." in prob or "e" in prob.lower():
            raise FormatError(f"probabilities must be integers or fractions, found {prob!r}", line)
        key = ids[label]
        w[key] = w.get(key, Fraction(0)) + q
    try:
        return Dist(w)
    except DistError as e:
        raise FormatError(str(e), line) from None


def load_automaton(text: str) -> ProbAutomaton:
    name = None
    external: list[str] = []
    internal: list[str] = []
    ids: dict[str, int] = {}
    init: Dist | None = None
    finals: list[int] = []
    trans: list[Transition] = []
    for line, words in _lines(text):
        kw, rest = words[0], words[1:]
        if kw == "automaton":
            if name is not None or len(rest) != 1:
                raise FormatError("expected a single 'automaton NAME' header", line)
            name = rest[0]
        elif name is None:
            raise FormatError("file must start with 'automaton NAME'", line)
        elif kw == "external":
            external += rest
        elif kw == "internal":
            internal += rest
        elif kw == "states":
            for lab in rest:
                if lab in ids:
                    raise FormatError(f"duplicate state {lab!r}", line)
                ids[lab] = fresh_id()
        elif kw == "init":
            init = _parse_dist(rest, ids, line)
        elif kw == "final":
            for lab in rest:
                if lab not in ids:
                    raise FormatError(f"unknown state {lab!r}", line)
                finals.append(ids[lab])
        elif kw == "trans":
            if len(rest) < 4 or rest[2] != "->":
                raise FormatError("expected 'trans STATE ACTION -> STATE:PROB ...'", line)
            if rest[0] not in ids:
                raise FormatError(f"unknown state {rest[0]!r}", line)
            trans.append(Transition(ids[rest[0]], rest[1], _parse_dist(rest[3:], ids, line)))
        else:
            raise FormatError(f"unknown keyword {kw!r}", line)
    if name is None:
        raise FormatError("empty automaton file")
    if init is None:
        raise FormatError("missing 'init' line")
    try:
        alphabet = ActionAlphabet(external, internal)
        for t in trans:
            if t.action != TAU and t.action not in alphabet.actions:
                raise AutomatonError(f"undeclared action {t.action!r}")
        return ProbAutomaton(ids.values(), alphabet, trans, init, finals,
                             names={i: lab for lab, i in ids.items()}, name=name)
    except AutomatonError as e:
        raise FormatError(str(e)) from None


def dump_relation(s: SimRelation, p: ProbAutomaton, q: ProbAutomaton, name: str = "S") -> str:
    lp, lq = state_labels(p), state_labels(q)
    lines = [f"relation {name} from {p.name or 'P'} to {q.name or 'Q'}"]
    for x, nu in s.sorted_pairs():
        lines.append(f"pair {lp[x]} ~ {_dist(nu, lq)}")
    return "\n".join(lines) + "\n"


def load_relation(text: str, p: ProbAutomaton, q: ProbAutomaton) -> SimRelation:
    """Read a relation whose labels refer to states of ``p`` (left) and ``q`` (right)."""
    left = {lab: s for s, lab in state_labels(p).items()}
    right = {lab: s for s, lab in state_labels(q).items()}
    header = False
    pairs = []
    for line, words in _lines(text):
        if words[0] == "relation":
            if header or len(words) != 6 or words[2] != "from" or words[4] != "to":
                raise FormatError("expected 'relation NAME from LEFT to RIGHT'", line)
            header = True
        elif words[0] == "pair":
            if not header:
                raise FormatError("file must start with a 'relation' header", line)
            if len(words) < 4 or words[2] != "~":
                raise FormatError("expected 'pair STATE ~ STATE:PROB ...'", line)
            if words[1] not in left:
                raise FormatError(f"unknown left state {words[1]!r}", line)
            pairs.append((left[words[1]], _parse_dist(words[3:], right, line)))
        else:
            raise FormatError(f"unknown keyword {words[0]!r}", line)
    if not header:
        raise FormatError("empty relation file")
    return SimRelation(pairs)
