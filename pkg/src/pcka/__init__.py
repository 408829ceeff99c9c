"""Probabilistic concurrent Kleene algebra over probabilistic automata.

Automata and their operator constructions live in :mod:`pcka.automata`,
lifting and weak transitions in :mod:`pcka.semantics`, simulation checking
and search in :mod:`pcka.simulation`, the term language in :mod:`pcka.terms`,
algebraic laws in :mod:`pcka.laws` and rely/guarantee reasoning in
:mod:`pcka.rg`.
"""

from .automata import (TAU, ActionAlphabet, AutomatonError, ProbAutomaton, Transition,
                       action, deadlock, par, pchoice, plus, reachable, run, seq, skip,
                       star, unfold)
from .dist import Dist
from .simulation import (CheckResult, SimRelation, Verdict, equiv, find_simulation, leq,
                         verify_simulation)
from .terms import compile_term, parse, parse_term, pretty

__all__ = [
    "TAU", "ActionAlphabet", "AutomatonError", "Dist", "ProbAutomaton", "Transition",
    "action", "deadlock", "par", "pchoice", "plus", "reachable", "run", "seq", "skip",
    "star", "unfold",
    "CheckResult", "SimRelation", "Verdict", "equiv", "find_simulation", "leq",
    "verify_simulation",
    "compile_term", "parse", "parse_term", "pretty",
]
__version__ = "0.1.0"
