"""Graphviz DOT export in the style of the usual automaton figures.

Action edges are solid.  A transition into a non-point distribution goes to a
small intermediate node, from which dashed edges labelled with probabilities
lead to the states; identical distributions share one such node.  Output
depends only on the automaton, so it is byte-identical across runs.
"""

from __future__ import annotations

from fractions import Fraction

from .automata import ProbAutomaton
from .dist import Dist
from .textio import state_labels

__all__ = ["to_dot"]


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _p(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def to_dot(p: ProbAutomaton, name: str | None = None) -> str:
    lab = state_labels(p)
    order = sorted(p.states)
    lines = [f"digraph {_q(name or p.name or 'A')} {{", "  rankdir=TB;",
             '  node [shape=circle, fontname="Helvetica"];',
             '  edge [fontname="Helvetica"];']
    for s in order:
        shape = ", shape=doublecircle" if s in p.finals else ""
        lines.append(f"  {_q(lab[s])} [label={_q(lab[s])}{shape}];")

    branches: dict[Dist, str] = {}
    body: list[str] = []

    def into(d: Dist) -> str:
        if d.is_point():
            (y,) = d.support
            return _q(lab[y])
        if d not in branches:
            node = f"_d{len(branches)}"
            branches[d] = node
            body.append(f"  {_q(node)} [shape=point, width=0.06, label=\"\"];")
            for y, w in sorted(d.items(), key=lambda kv: lab[kv[0]]):
                body.append(f"  {_q(node)} -> {_q(lab[y])} [style=dashed, label={_q(_p(w))}];")
        return _q(branches[d])

    body.append('  "_init" [shape=none, label=""];')
    body.append(f"  \"_init\" -> {into(p.initial)};")
    for t in sorted(p.transitions, key=lambda t: (lab[t.source], t.action,
                                                  [(lab[y], w) for y, w in t.target.sorted_items()])):
        body.append(f"  {_q(lab[t.source])} -> {into(t.target)} [label={_q(t.action)}];")
    lines += body
    lines.append("}")
    return "\n".join(lines) + "\n"
