"""Algebraic laws, their witness relations and randomised checking.

Each law is stated once as a builder over an abstract set of operators, so
the same definition produces terms (for display) and automata (for
checking).  Where a law has an explicit simulation in its soundness proof
(distributivity, star unfolding, interchange, congruences) the relation is
rebuilt from the provenance maps of the constructed automata and only
verified; the other laws fall back to :func:`find_simulation`.
"""

from __future__ import annotations

import random
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from . import automata as A
from .automata import ActionAlphabet, ProbAutomaton, embedding, reachable
from .dist import Dist
from .simulation import (DEFAULT_BUDGET, CheckResult, SimRelation, Verdict, find_simulation,
                         verify_simulation)
from .terms import (Act, One, Par, PChoice, Plus, Run, Seq, Star, Term, Zero, compile_term,
                    pretty)

__all__ = [
    "Law", "LawReport", "law_registry", "get_law", "check_law", "law_instances",
    "random_terms", "state_count", "DEFAULT_ALPHABET", "PROBABILITIES",
    "witness_constructors", "congruence", "check_star_induction", "StarInductionReport",
    "approximant", "counterexample_catalog", "CatalogEntry", "run_catalog_entry",
    "pc_assoc_params", "LEQ", "GEQ", "CONGRUENCE_OPS", "verified_pairs", "check_congruence",
]

DEFAULT_ALPHABET = ActionAlphabet(["a", "b", "c"])
PROBABILITIES = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3),
                 Fraction(3, 4), Fraction(1, 5))
LEQ, GEQ = "<=", ">="


# -- operator vocabularies -------------------------------------------------------

class _TermOps:
    def __init__(self, alphabet: ActionAlphabet):
        self.frame = alphabet.external

    zero = staticmethod(Zero)
    one = staticmethod(One)
    plus = staticmethod(Plus)
    seq = staticmethod(Seq)
    star = staticmethod(Star)

    @staticmethod
    def pchoice(a, p, b):
        return PChoice(a, p, b)

    def par(self, a, b):
        return Par(a, self.frame, b)


class _AutOps:
    def __init__(self, alphabet: ActionAlphabet):
        self.alphabet = alphabet

    def zero(self):
        return A.deadlock(self.alphabet)

    def one(self):
        return A.skip(self.alphabet)

    plus = staticmethod(A.plus)
    seq = staticmethod(A.seq)
    star = staticmethod(A.star)
    pchoice = staticmethod(A.pchoice)

    def par(self, a, b):
        return A.par(a, self.alphabet.external, b)


# -- registry ----------------------------------------------------------------------

@dataclass(frozen=True)
class Law:
    id: str
    arity: int
    direction: str  # "equiv" or "leq" (left below right)
    build: Callable
    text: str
    witness: str | None = None
    params: tuple[str, ...] = ()

    @property
    def directions(self) -> tuple[str, ...]:
        return (LEQ, GEQ) if self.direction == "equiv" else (LEQ,)

    def sides(self, ops, args: Sequence, params: dict) -> tuple:
        if len(args) != self.arity:
            raise ValueError(f"law {self.id} takes {self.arity} operands, got {len(args)}")
        return self.build(ops, *args, **params)


def pc_assoc_params(p: Fraction, q: Fraction) -> tuple[Fraction, Fraction]:
    """``(p′, q′)`` with ``p′q′ = p``, ``(1−p′)q′ = (1−p)q`` and ``1−q′ = (1−p)(1−q)``."""
    q2 = 1 - (1 - p) * (1 - q)
    p2 = p / q2 if q2 else Fraction(0)
    return p2, q2


def _pc_assoc(o, P, Q, R, p, q):
    p2, q2 = pc_assoc_params(p, q)
    return o.pchoice(P, p, o.pchoice(Q, q, R)), o.pchoice(o.pchoice(P, p2, Q), q2, R)


_LAWS = [
    Law("plus-idem", 1, "equiv", lambda o, P: (P, o.plus(P, P)), "P = P + P"),
    Law("plus-zero", 1, "equiv", lambda o, P: (P, o.plus(P, o.zero())), "P = P + 0"),
    Law("plus-comm", 2, "equiv", lambda o, P, Q: (o.plus(P, Q), o.plus(Q, P)), "P + Q = Q + P"),
    Law("plus-assoc", 3, "equiv",
        lambda o, P, Q, R: (o.plus(P, o.plus(Q, R)), o.plus(o.plus(P, Q), R)),
        "P + (Q + R) = (P + Q) + R"),
    Law("pc-idem", 1, "equiv", lambda o, P, p: (P, o.pchoice(P, p, P)), "P = P +[p] P",
        params=("p",)),
    Law("pc-comm", 2, "equiv", lambda o, P, Q, p: (o.pchoice(P, p, Q), o.pchoice(Q, 1 - p, P)),
        "P +[p] Q = Q +[1-p] P", params=("p",)),
    Law("pc-assoc", 3, "equiv", _pc_assoc, "P +[p] (Q +[q] R) = (P +[p'] Q) +[q'] R",
        params=("p", "q")),
    Law("seq-right-skip", 1, "equiv", lambda o, P: (P, o.seq(P, o.one())), "P = P . 1"),
    Law("seq-left-skip", 1, "equiv", lambda o, P: (P, o.seq(o.one(), P)), "P = 1 . P"),
    Law("seq-left-zero", 1, "equiv", lambda o, P: (o.zero(), o.seq(o.zero(), P)), "0 = 0 . P"),
    Law("seq-assoc", 3, "equiv",
        lambda o, P, Q, R: (o.seq(P, o.seq(Q, R)), o.seq(o.seq(P, Q), R)),
        "P . (Q . R) = (P . Q) . R"),
    Law("right-dist", 3, "equiv",
        lambda o, P, Q, R: (o.plus(o.seq(P, R), o.seq(Q, R)), o.seq(o.plus(P, Q), R)),
        "P . R + Q . R = (P + Q) . R", witness="right_dist"),
    Law("left-subdist", 3, "leq",
        lambda o, P, Q, R: (o.plus(o.seq(P, Q), o.seq(P, R)), o.seq(P, o.plus(Q, R))),
        "P . Q + P . R <= P . (Q + R)", witness="left_subdist"),
    Law("pc-dist", 3, "equiv",
        lambda o, P, Q, R, p: (o.seq(o.pchoice(P, p, Q), R),
                               o.pchoice(o.seq(P, R), p, o.seq(Q, R))),
        "(P +[p] Q) . R = P . R +[p] Q . R", witness="pc_dist", params=("p",)),
    Law("pc-supdist", 3, "leq",
        lambda o, P, Q, R, p: (o.seq(P, o.pchoice(Q, p, R)),
                               o.pchoice(o.seq(P, Q), p, o.seq(P, R))),
        "P . (Q +[p] R) <= P . Q +[p] P . R", witness="pc_supdist", params=("p",)),
    Law("star-unfold", 1, "equiv",
        lambda o, P: (o.star(P), o.plus(o.one(), o.seq(P, o.star(P)))),
        "P* = 1 + P . P*", witness="star_unfold"),
    Law("star-induction", 2, "leq",
        lambda o, P, Q: (o.seq(o.star(P), Q), Q),
        "P . Q <= Q implies P* . Q <= Q"),
    Law("par-comm", 2, "equiv", lambda o, P, Q: (o.par(P, Q), o.par(Q, P)), "P || Q = Q || P"),
    Law("par-assoc", 3, "equiv",
        lambda o, P, Q, R: (o.par(P, o.par(Q, R)), o.par(o.par(P, Q), R)),
        "P || (Q || R) = (P || Q) || R"),
    Law("interchange", 4, "leq",
        lambda o, P, Q, P2, Q2: (o.seq(o.par(P, Q), o.par(P2, Q2)),
                                 o.par(o.seq(P, P2), o.seq(Q, Q2))),
        "(P || Q) . (P' || Q') <= P . P' || Q . Q'", witness="interchange"),
    Law("par-subdist", 3, "leq",
        lambda o, P, Q, R: (o.plus(o.par(P, Q), o.par(P, R)), o.par(P, o.plus(Q, R))),
        "P || Q + P || R <= P || (Q + R)"),
    Law("par-pc-dist", 3, "equiv",
        lambda o, P, Q, R, p: (o.pchoice(o.par(P, Q), p, o.par(P, R)),
                               o.par(P, o.pchoice(Q, p, R))),
        "P || Q +[p] P || R = P || (Q +[p] R)", params=("p",)),
    Law("pc-le-plus", 2, "leq", lambda o, P, Q, p: (o.pchoice(P, p, Q), o.plus(P, Q)),
        "P +[p] Q <= P + Q", params=("p",)),
]


def law_registry() -> list[Law]:
    return list(_LAWS)


def get_law(law_id: str) -> Law:
    for law in _LAWS:
        if law.id == law_id:
            return law
    raise KeyError(f"unknown law {law_id!r}")


# -- witness relations -------------------------------------------------------------

Pairs = set[tuple[Hashable, Dist]]


def _copy(pairs: Pairs, left: dict, right: dict) -> None:
    """``(left[x], δ right[x])`` for every operand state ``x``."""
    for x, s in left.items():
        pairs.add((s, Dist.point(right[x])))


def _invert(pairs: Pairs) -> Pairs:
    return {(nu_x, Dist.point(x)) for x, nu in pairs for nu_x in [next(iter(nu))]}


def _right_dist(lhs: ProbAutomaton, rhs: ProbAutomaton) -> dict[str, Pairs]:
    # lhs = P.R + Q.R_c, rhs = (P+Q).R
    s: Pairs = {(lhs.fresh["z"], Dist.point(embedding(rhs, 0)[rhs.parts[0].fresh["z"]]))}
    _copy(s, embedding(lhs, 0, 0), embedding(rhs, 0, 0))
    _copy(s, embedding(lhs, 1, 0), embedding(rhs, 0, 1))
    _copy(s, embedding(lhs, 0, 1), embedding(rhs, 1))
    _copy(s, embedding(lhs, 1, 1), embedding(rhs, 1))
    return {LEQ: s, GEQ: _invert(s)}


def _pc_dist(lhs: ProbAutomaton, rhs: ProbAutomaton) -> dict[str, Pairs]:
    # lhs = (P +p Q).R, rhs = P.R +p Q.R_c
    s: Pairs = set()
    _copy(s, embedding(lhs, 0, 0), embedding(rhs, 0, 0))
    _copy(s, embedding(lhs, 0, 1), embedding(rhs, 1, 0))
    _copy(s, embedding(lhs, 1), embedding(rhs, 0, 1))
    _copy(s, embedding(lhs, 1), embedding(rhs, 1, 1))
    return {LEQ: s, GEQ: _invert(s)}


def _left_subdist(lhs: ProbAutomaton, rhs: ProbAutomaton) -> dict[str, Pairs]:
    # lhs = P.Q + P_c.R, rhs = P.(Q+R)
    s: Pairs = {(lhs.fresh["z"], rhs.initial)}
    _copy(s, embedding(lhs, 0, 0), embedding(rhs, 0))
    _copy(s, embedding(lhs, 1, 0), embedding(rhs, 0))
    _copy(s, embedding(lhs, 0, 1), embedding(rhs, 1, 0))
    _copy(s, embedding(lhs, 1, 1), embedding(rhs, 1, 1))
    return {LEQ: s}


def _pc_supdist(lhs: ProbAutomaton, rhs: ProbAutomaton, p: Fraction) -> dict[str, Pairs]:
    # lhs = P.(Q +p R), rhs = P.Q +p P_c.R
    s: Pairs = set()
    e1, e2 = embedding(rhs, 0, 0), embedding(rhs, 1, 0)
    for x, sx in embedding(lhs, 0).items():
        s.add((sx, Dist.combine([(p, Dist.point(e1[x])), (1 - p, Dist.point(e2[x]))])))
    _copy(s, embedding(lhs, 1, 0), embedding(rhs, 0, 1))
    _copy(s, embedding(lhs, 1, 1), embedding(rhs, 1, 1))
    return {LEQ: s}


def _star_unfold(lhs: ProbAutomaton, rhs: ProbAutomaton) -> dict[str, Pairs]:
    # lhs = P*, rhs = 1 + P.P*
    v, u = lhs.fresh["z"], rhs.fresh["z"]
    inner = rhs.parts[1].parts[1]
    v2 = embedding(rhs, 1, 1)[inner.fresh["z"]]
    o = embedding(rhs, 0)[next(iter(rhs.parts[0].states))]
    x_star, x_star2, x_plain = embedding(lhs, 0), embedding(rhs, 1, 1, 0), embedding(rhs, 1, 0)
    fwd: Pairs = {(v, Dist.point(v2)), (v, Dist.point(u))}
    _copy(fwd, x_star, x_star2)
    _copy(fwd, x_star, x_plain)
    bwd = _invert(fwd) | {(o, Dist.point(v))}
    return {LEQ: fwd, GEQ: bwd}


def _interchange(lhs: ProbAutomaton, rhs: ProbAutomaton) -> dict[str, Pairs]:
    # lhs = (P||Q).(P'||Q'), rhs = P.P' || Q.Q'
    pp, qq = rhs.parts
    s: Pairs = set()
    for i in (0, 1):
        block = lhs.parts[i]
        for st, (x, y) in block.pairs.items():
            target = rhs.pair_index[(pp.maps[i][x], qq.maps[i][y])]
            s.add((lhs.maps[i][st], Dist.point(target)))
    return {LEQ: s}


def witness_constructors() -> dict[str, Callable]:
    """Named relation builders: ``f(lhs, rhs, params) -> {direction: pairs}``."""
    return {
        "right_dist": lambda l, r, prm: _right_dist(l, r),
        "left_subdist": lambda l, r, prm: _left_subdist(l, r),
        "pc_dist": lambda l, r, prm: _pc_dist(l, r),
        "pc_supdist": lambda l, r, prm: _pc_supdist(l, r, prm["p"]),
        "star_unfold": lambda l, r, prm: _star_unfold(l, r),
        "interchange": lambda l, r, prm: _interchange(l, r),
    }


def congruence(op: str, s: SimRelation | Iterable, p: ProbAutomaton, q: ProbAutomaton,
               r: ProbAutomaton | None = None, *, prob: Fraction = Fraction(1, 2),
               frame: Iterable[str] | None = None, swap: bool = False
               ) -> tuple[ProbAutomaton, ProbAutomaton, SimRelation]:
    """From a simulation ``S: p → q`` build ``op(p, r) ≤ op(q, r)`` and its relation.

    ``op`` is one of ``plus``, ``seq``, ``star``, ``pchoice``, ``par``;
    ``swap`` puts ``r`` on the left.
    """
    pairs = list(s)
    if op == "star":
        lhs, rhs = A.star(p), A.star(q)
        ep, eq = lhs.maps[0], rhs.maps[0]
        out = {(ep[x], nu.map(eq.__getitem__)) for x, nu in pairs}
        out.add((lhs.fresh["z"], Dist.point(rhs.fresh["z"])))
        return lhs, rhs, SimRelation(out)
    if r is None:
        raise ValueError(f"{op} congruence needs a third automaton")
    if op == "par":
        fr = p.alphabet.external if frame is None else frozenset(frame)
        if swap:
            lhs, rhs = A.par(r, fr, p), A.par(r, fr, q)
            out = {(lhs.pair_index[(y, x)], Dist.point(y).product(nu).map(rhs.pair_index.__getitem__))
                   for x, nu in pairs for y in r.states}
        else:
            lhs, rhs = A.par(p, fr, r), A.par(q, fr, r)
            out = {(lhs.pair_index[(x, y)], nu.product(Dist.point(y)).map(rhs.pair_index.__getitem__))
                   for x, nu in pairs for y in r.states}
        return lhs, rhs, SimRelation(out)
    build = {"plus": A.plus, "seq": A.seq,
             "pchoice": lambda a, b: A.pchoice(a, prob, b)}[op]
    lhs, rhs = (build(r, p), build(r, q)) if swap else (build(p, r), build(q, r))
    i, j = (1, 0) if swap else (0, 1)
    ep, eq = lhs.maps[i], rhs.maps[i]
    out = {(ep[x], nu.map(eq.__getitem__)) for x, nu in pairs}
    _copy(out, lhs.maps[j], rhs.maps[j])
    if op == "plus":
        out.add((lhs.fresh["z"], Dist.point(rhs.fresh["z"])))
    return lhs, rhs, SimRelation(out)


def verify_constructed(pairs: Iterable, lhs: ProbAutomaton, rhs: ProbAutomaton,
                       horizon: int | None = None) -> CheckResult:
    """Verify a constructed relation on the reachable part of ``lhs``."""
    left = reachable(lhs)
    rel = SimRelation((x, nu) for x, nu in pairs if x in left.states)
    return verify_simulation(rel, left, rhs, horizon)


# -- random terms ------------------------------------------------------------------

def state_count(t: Term) -> int:
    """Number of states of the compiled automaton."""
    if isinstance(t, (Zero, One)):
        return 1
    if isinstance(t, Act):
        return 2
    if isinstance(t, Run):
        return 3 * len(t.actions)
    if isinstance(t, Star):
        return state_count(t.body) + 1
    if isinstance(t, Plus):
        return state_count(t.left) + state_count(t.right) + 1
    if isinstance(t, Par):
        return state_count(t.left) * state_count(t.right)
    return state_count(t.left) + state_count(t.right)


def _draw(rng: random.Random, depth: int, alphabet: ActionAlphabet) -> Term:
    acts = sorted(alphabet.actions)
    ext = sorted(alphabet.external)
    if depth == 0 or rng.random() < 0.3:
        k = rng.random()
        if k < 0.12:
            return Zero()
        if k < 0.25:
            return One()
        if k < 0.3 and depth > 0:
            return Run(frozenset(rng.sample(ext, rng.randint(1, len(ext)))))
        return Act(rng.choice(acts))
    op = rng.choice(["plus", "seq", "seq", "star", "pchoice", "par"])
    if op == "star":
        return Star(_draw(rng, depth - 1, alphabet))
    left, right = _draw(rng, depth - 1, alphabet), _draw(rng, depth - 1, alphabet)
    if op == "plus":
        return Plus(left, right)
    if op == "seq":
        return Seq(left, right)
    if op == "pchoice":
        return PChoice(left, rng.choice(PROBABILITIES), right)
    return Par(left, alphabet.external, right)


def _random_term(rng: random.Random, max_depth: int, alphabet: ActionAlphabet,
                 max_states: int) -> Term:
    while True:
        t = _draw(rng, max_depth, alphabet)
        if state_count(t) <= max_states:
            return t


def random_terms(seed: int, count: int, max_depth: int = 3,
                 alphabet: ActionAlphabet = DEFAULT_ALPHABET, max_states: int = 60) -> list[Term]:
    """Deterministic sample of terms of depth at most ``max_depth``.

    Parallel compositions synchronise on all external actions; terms whose
    automaton would exceed ``max_states`` states are redrawn.
    """
    rng = random.Random(seed)
    return [_random_term(rng, max_depth, alphabet, max_states) for _ in range(count)]


# per-operand state caps keep products and repeated operands small
_OPERAND_CAP = {"par-comm": 10, "par-assoc": 6, "interchange": 6, "par-subdist": 6,
                "par-pc-dist": 6}


def law_instances(law: Law | str, seed: int, count: int, max_depth: int = 3,
                  alphabet: ActionAlphabet = DEFAULT_ALPHABET
                  ) -> list[tuple[int, list[Term], dict[str, Fraction]]]:
    """``count`` instances ``(index, operands, params)`` reproducible from ``seed`` and the law."""
    law = get_law(law) if isinstance(law, str) else law
    rng = random.Random(f"{law.id}/{seed}")
    cap = _OPERAND_CAP.get(law.id, 20)
    out = []
    for i in range(count):
        if law.id == "star-induction":
            out.append((i, list(_induction_pair(rng, max_depth, alphabet)), {}))
            continue
        args = [_random_term(rng, max_depth, alphabet, cap) for _ in range(law.arity)]
        params = {k: rng.choice(PROBABILITIES) for k in law.params}
        out.append((i, args, params))
    return out


def _induction_pair(rng: random.Random, max_depth: int, alphabet: ActionAlphabet
                    ) -> tuple[Term, Term]:
    """``(P, Q)`` with ``P·Q ≤ Q``: either ``Q = P*·R`` or ``Q = run`` over every action."""
    p = _random_term(rng, max(max_depth - 1, 0), alphabet, 10)
    if rng.random() < 0.75:
        return p, Seq(Star(p), _random_term(rng, max(max_depth - 1, 0), alphabet, 10))
    return p, Run(alphabet.external)


# -- checking ----------------------------------------------------------------------

@dataclass
class LawReport:
    law: str
    seed: int | None
    index: int
    operands: list[Term]
    params: dict[str, Fraction]
    results: dict[str, CheckResult] = field(default_factory=dict)
    methods: dict[str, str] = field(default_factory=dict)
    lhs: Term | None = None
    rhs: Term | None = None
    automata: tuple[ProbAutomaton, ProbAutomaton] | None = None

    @property
    def verdict(self) -> Verdict:
        return Verdict.worst(r.status for r in self.results.values())

    def lines(self) -> list[str]:
        return [f"LAW {self.law} SEED {self.seed} {self.index} {d} -> {r.status.value}"
                for d, r in self.results.items()]


def check_law(law_id: str, operands: Sequence[Term], alphabet: ActionAlphabet = DEFAULT_ALPHABET,
              params: dict[str, Fraction] | None = None, *, seed: int | None = None,
              index: int = 0, horizon: int | None = None, budget: int = DEFAULT_BUDGET,
              method: str = "auto", directions: Sequence[str] | None = None) -> LawReport:
    """Check one instance of a law in each of its directions.

    ``method`` is ``auto`` (constructor when the law has one, else search),
    ``constructor`` or ``search``.  ``directions`` may include the converse of
    an inequation to check it by search.
    """
    law = get_law(law_id)
    if law.id == "star-induction":
        # the report carries the direct result; approximants are a separate check
        rep = check_star_induction(operands[0], operands[1], alphabet, k_max=0,
                                   horizon=horizon, budget=budget)
        out = LawReport(law.id, seed, index, list(operands), {})
        out.results[LEQ] = rep.conclusion
        out.methods[LEQ] = "search"
        return out
    params = dict(params or {})
    missing = set(law.params) - params.keys()
    if missing:
        raise ValueError(f"law {law.id} needs parameters {sorted(missing)}")
    autos = [compile_term(t, alphabet) for t in operands]
    lhs, rhs = law.sides(_AutOps(alphabet), autos, params)
    tl, tr = law.sides(_TermOps(alphabet), list(operands), params)
    rep = LawReport(law.id, seed, index, list(operands), params, lhs=tl, rhs=tr,
                    automata=(lhs, rhs))
    use_witness = law.witness is not None and method in ("auto", "constructor")
    if method == "constructor" and law.witness is None:
        raise ValueError(f"law {law.id} has no witness constructor")
    rels = witness_constructors()[law.witness](lhs, rhs, params) if use_witness else {}
    for d in directions or law.directions:
        left, right = (lhs, rhs) if d == LEQ else (rhs, lhs)
        if d in rels:
            rep.results[d] = verify_constructed(rels[d], left, right, horizon)
            rep.methods[d] = "constructor"
        else:
            rep.results[d] = find_simulation(left, right, horizon, budget)
            rep.methods[d] = "search"
    return rep


# -- precongruence ----------------------------------------------------------------

CONGRUENCE_OPS = ("plus", "seq-right", "seq-left", "star", "pchoice", "par")


def verified_pairs(seed: int, count: int, alphabet: ActionAlphabet = DEFAULT_ALPHABET,
                   max_depth: int = 2) -> list[tuple[ProbAutomaton, ProbAutomaton, SimRelation]]:
    """``count`` triples ``(P, Q, S)`` where ``S`` verifies ``P ≤ Q``.

    Pairs are the two sides of random instances of the registered laws, in a
    direction that holds; ``P`` is the reachable part of its side.
    """
    rng = random.Random(f"pairs/{seed}")
    laws = [law for law in _LAWS if law.id != "star-induction"]
    out = []
    while len(out) < count:
        law = rng.choice(laws)
        args = [_random_term(rng, max_depth, alphabet, 8) for _ in range(law.arity)]
        params = {k: rng.choice(PROBABILITIES) for k in law.params}
        d = rng.choice(law.directions)
        rep = check_law(law.id, args, alphabet, params, directions=[d])
        res = rep.results[d]
        if res.verified:
            lhs, rhs = rep.automata if d == LEQ else rep.automata[::-1]
            out.append((reachable(lhs), rhs, res.relation))
    return out


def check_congruence(op: str, p: ProbAutomaton, q: ProbAutomaton, s: SimRelation,
                     r: ProbAutomaton, prob: Fraction = Fraction(1, 2),
                     horizon: int | None = None) -> CheckResult:
    """Verify ``op(P, R) ≤ op(Q, R)`` with the relation built from ``S``, no search."""
    kind, _, side = op.partition("-")
    lhs, rhs, rel = congruence(kind, s, p, q, r, prob=prob, swap=side == "left")
    return verify_constructed(rel, lhs, rhs, horizon)


# -- star induction ---------------------------------------------------------------

def approximant(p: Term, k: int) -> Term:
    """``F^k(0)`` for ``F(X) = 1 + p·X``."""
    t: Term = Zero()
    for _ in range(k):
        t = Plus(One(), Seq(p, t))
    return t


@dataclass
class StarInductionReport:
    premise: CheckResult
    approximants: dict[int, CheckResult] = field(default_factory=dict)
    conclusion: CheckResult | None = None

    @property
    def premise_holds(self) -> bool:
        return self.premise.verified


def check_star_induction(p: Term, q: Term, alphabet: ActionAlphabet = DEFAULT_ALPHABET,
                         k_max: int = 4, *, horizon: int | None = None,
                         budget: int = DEFAULT_BUDGET, direct: bool = True) -> StarInductionReport:
    """Check ``P·Q ≤ Q``, then ``F^k(0)·Q ≤ Q`` for ``1 ≤ k ≤ k_max`` and ``P*·Q ≤ Q`` directly.

    When the premise is not verified nothing else is attempted and the
    conclusion is reported ``Inconclusive``.
    """
    def leq(a: Term, b: Term) -> CheckResult:
        return find_simulation(compile_term(a, alphabet), compile_term(b, alphabet), horizon, budget)

    premise = leq(Seq(p, q), q)
    rep = StarInductionReport(premise)
    if not premise.verified:
        rep.conclusion = CheckResult(Verdict.INCONCLUSIVE, reason=f"premise {premise.status.value.lower()}")
        return rep
    for k in range(1, k_max + 1):
        rep.approximants[k] = leq(Seq(approximant(p, k), q), q)
    if direct:
        rep.conclusion = leq(Seq(Star(p), q), q)
    else:
        rep.conclusion = CheckResult(Verdict.INCONCLUSIVE, reason="unbounded claim not checked")
    return rep


# -- counterexamples --------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    id: str
    claim: str
    alphabet: ActionAlphabet
    false_left: Term
    false_right: Term

    def texts(self) -> tuple[str, str]:
        return pretty(self.false_left), pretty(self.false_right)


def counterexample_catalog() -> list[CatalogEntry]:
    """Fixed instances where a stronger form of a law fails.

    Each entry states ``false_left <= false_right``, which must be refuted,
    while ``false_right <= false_left`` holds.
    """
    one_a = ActionAlphabet(["a"])
    abc = DEFAULT_ALPHABET
    a, b, c = Act("a"), Act("b"), Act("c")
    fa = frozenset(["a"])
    half = Fraction(1, 2)
    return [
        CatalogEntry("interchange-eq", "P . P' || Q . Q' <= (P || Q) . (P' || Q')", one_a,
                     Par(Seq(a, One()), fa, Seq(One(), a)),
                     Seq(Par(a, fa, One()), Par(One(), fa, a))),
        CatalogEntry("left-subdist-converse", "P . (Q + R) <= P . Q + P . R", abc,
                     Seq(a, Plus(b, c)), Plus(Seq(a, b), Seq(a, c))),
        CatalogEntry("pc-supdist-converse", "P . Q +[p] P . R <= P . (Q +[p] R)", abc,
                     PChoice(Seq(a, b), half, Seq(a, c)), Seq(a, PChoice(b, half, c))),
    ]


def run_catalog_entry(entry: CatalogEntry, horizon: int | None = None,
                      budget: int = DEFAULT_BUDGET) -> tuple[CheckResult, CheckResult]:
    """``(claimed-false direction, true direction)``."""
    left = compile_term(entry.false_left, entry.alphabet)
    right = compile_term(entry.false_right, entry.alphabet)
    return (find_simulation(left, right, horizon, budget),
            find_simulation(right, left, horizon, budget))
