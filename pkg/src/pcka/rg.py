"""Rely/guarantee quintuples and proof rules, checked on automata.

``P R {U} Q G`` holds when ``P·(R‖U) ≤ Q`` and ``U ≤ G``.  Each rule checks
its premises and then re-checks its conclusion semantically, so a rule
application is also a test of the rule.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from importlib import resources

from .automata import ActionAlphabet, ProbAutomaton
from .dist import Dist
from .simulation import DEFAULT_BUDGET, CheckResult, Verdict, equiv, find_simulation
from .terms import (Act, One, Par, PChoice, Plus, Run, Seq, Star, Term, TermSyntaxError, Zero,
                    compile_term, parse_term, parse_term_file, pretty, term_actions)

__all__ = [
    "RGQuintuple", "RGReport", "holds", "rule_concurrent_isolated", "rule_asymmetric",
    "rule_general_env", "rule_sequential", "ScenarioError", "ScenarioReport", "run_scenario",
    "vending_machine_case_study", "branch_weights", "check_terms",
]


@dataclass(frozen=True)
class RGQuintuple:
    """``P R {U} Q G`` over one alphabet; ``frame`` defaults to all external actions."""

    p: Term
    r: Term
    u: Term
    q: Term
    g: Term
    alphabet: ActionAlphabet
    frame: frozenset = None  # type: ignore[assignment]
    labels: tuple[str, str, str, str, str] | None = None

    def __post_init__(self):
        frame = self.alphabet.external if self.frame is None else frozenset(self.frame)
        if not frame <= self.alphabet.external:
            raise ValueError(f"frame must contain external actions only: {sorted(frame)}")
        object.__setattr__(self, "frame", frame)

    @property
    def run(self) -> Run:
        return Run(self.frame)

    def par(self, a: Term, b: Term) -> Par:
        return Par(a, self.frame, b)

    def names(self) -> tuple[str, str, str, str, str]:
        if self.labels:
            return self.labels
        return tuple(_show(t, self.frame) for t in (self.p, self.r, self.u, self.q, self.g))

    def text(self) -> str:
        p, r, u, q, g = self.names()
        return f"{p} {r} {{{u}}} {q} {g}"

    def derive(self, labels: tuple[str, ...] | None = None, **parts) -> "RGQuintuple":
        """A quintuple with some parts replaced; ``labels`` names all five parts."""
        fields = dict(p=self.p, r=self.r, u=self.u, q=self.q, g=self.g)
        fields.update(parts)
        return RGQuintuple(alphabet=self.alphabet, frame=self.frame, labels=labels, **fields)


def _show(t: Term, frame: frozenset) -> str:
    if isinstance(t, Run) and t.actions == frame:
        return "run"
    return _atom(pretty(t))


def _atom(text: str) -> str:
    if re.fullmatch(r"[\w']+", text) or _enclosed(text):
        return text
    return f"({text})"


def _enclosed(text: str) -> bool:
    """Whether the outer parentheses of ``text`` match each other."""
    if not (text.startswith("(") and text.endswith(")")):
        return False
    depth = 0
    for i, ch in enumerate(text):
        depth += {"(": 1, ")": -1}.get(ch, 0)
        if depth == 0 and i < len(text) - 1:
            return False
    return True


def _join(op: str, a: str, b: str) -> str:
    return f"{_atom(a)}{op}{_atom(b)}" if op == "." else f"({_atom(a)}{op}{_atom(b)})"


def check_terms(a: Term, b: Term, alphabet: ActionAlphabet, horizon: int | None = None,
                budget: int = DEFAULT_BUDGET, *, both: bool = False) -> CheckResult:
    """``a ≤ b`` (or ``a ≡ b``) by search on the compiled automata."""
    pa, pb = compile_term(a, alphabet), compile_term(b, alphabet)
    if both:
        return equiv(pa, pb, horizon, budget)
    return find_simulation(pa, pb, horizon, budget)


@dataclass
class RGReport:
    rule: str
    conclusions: list[RGQuintuple]
    premises: dict[str, CheckResult] = field(default_factory=dict)
    conclusion: dict[str, CheckResult] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def applied(self) -> bool:
        return all(r.verified for r in self.premises.values())

    @property
    def verdict(self) -> Verdict:
        """Verdict of the conclusion; ``Inconclusive`` when the rule could not be applied."""
        if not self.applied or not self.conclusion:
            return Verdict.INCONCLUSIVE
        return Verdict.worst(r.status for r in self.conclusion.values())

    def lines(self, label: str | None = None) -> list[str]:
        head = f"RG {label or self.rule}"
        out = [f"{head} premise {k} -> {r.status.value}" for k, r in self.premises.items()]
        if not self.applied:
            out.append(f"{head} conclusion -> not applied (premise failure)")
        for k, r in self.conclusion.items():
            out.append(f"{head} conclusion {k} -> {r.status.value}")
        out += [f"{head} note {n}" for n in self.notes]
        return out


def _quintuple_checks(q: RGQuintuple, tag: str, horizon, budget) -> dict[str, CheckResult]:
    p, r, u, post, g = (_atom(n) for n in q.names())
    tag = f"{tag}: " if tag else ""
    return {
        f"{tag}{p}.({r}||{u}) <= {post}": check_terms(Seq(q.p, q.par(q.r, q.u)), q.q,
                                                     q.alphabet, horizon, budget),
        f"{tag}{u} <= {g}": check_terms(q.u, q.g, q.alphabet, horizon, budget),
    }


def _leq(name: str, a: Term, b: Term, q: RGQuintuple, horizon, budget) -> dict[str, CheckResult]:
    return {name: check_terms(a, b, q.alphabet, horizon, budget)}


def holds(q: RGQuintuple, horizon: int | None = None, budget: int = DEFAULT_BUDGET) -> RGReport:
    """Check ``P·(R‖U) ≤ Q`` and ``U ≤ G``; either failing makes the quintuple fail."""
    rep = RGReport("holds", [q])
    rep.conclusion = _quintuple_checks(q, "", horizon, budget)
    return rep


def _same_setting(q1: RGQuintuple, q2: RGQuintuple) -> None:
    if q1.alphabet != q2.alphabet or q1.frame != q2.frame:
        raise ValueError("quintuples must share alphabet and frame")


def _actions_coincide(rep: RGReport, q1: RGQuintuple, q2: RGQuintuple) -> None:
    ext = q1.alphabet.external
    a1, a2 = term_actions(q1.u) & ext, term_actions(q2.u) & ext
    if a1 != a2:
        rep.premises["external actions of U and U' coincide"] = CheckResult(
            Verdict.REFUTED, reason=f"{sorted(a1)} vs {sorted(a2)}")


def _conclude(rep: RGReport, horizon, budget) -> RGReport:
    if rep.applied:
        for i, q in enumerate(rep.conclusions, 1):
            tag = "" if len(rep.conclusions) == 1 else f"#{i}"
            rep.conclusion.update(_quintuple_checks(q, tag, horizon, budget))
    return rep


def rule_concurrent_isolated(q1: RGQuintuple, q2: RGQuintuple, t: Term,
                             horizon: int | None = None, budget: int = DEFAULT_BUDGET) -> RGReport:
    """From ``P R {U} Q G``, ``P′ R′ {U′} Q′ G′``, ``G ≤ R′``, ``G′ ≤ R`` and ``T ≤ P, P′``
    conclude ``T run {U‖U′} Q (G‖G′)`` and the same with ``Q′``.

    The external actions of ``U`` and ``U′`` must coincide; a mismatch is
    reported as a failed premise.
    """
    _same_setting(q1, q2)
    n1, n2 = q1.names(), q2.names()
    tn = _show(t, q1.frame)
    names = (tn, "run", _join("||", n1[2], n2[2]), n1[3], _join("||", n1[4], n2[4]))
    base = q1.derive(names, p=t, r=q1.run, u=q1.par(q1.u, q2.u), g=q1.par(q1.g, q2.g))
    rep = RGReport("concurrent", [base, base.derive(names[:3] + (n2[3], names[4]), q=q2.q)])
    _actions_coincide(rep, q1, q2)
    rep.premises.update(_quintuple_checks(q1, "premise1", horizon, budget))
    rep.premises.update(_quintuple_checks(q2, "premise2", horizon, budget))
    rep.premises.update(_leq("G <= R'", q1.g, q2.r, q1, horizon, budget))
    rep.premises.update(_leq("G' <= R", q2.g, q1.r, q1, horizon, budget))
    rep.premises.update(_leq("T <= P", t, q1.p, q1, horizon, budget))
    rep.premises.update(_leq("T <= P'", t, q2.p, q1, horizon, budget))
    return _conclude(rep, horizon, budget)


def rule_asymmetric(q_env: RGQuintuple, q2: RGQuintuple, horizon: int | None = None,
                    budget: int = DEFAULT_BUDGET) -> RGReport:
    """From ``1 run {U} run G``, ``P′ R′ {U′} Q′ G′`` and ``G ≤ R′`` conclude
    ``P′ run {U‖U′} Q′ (G‖G′)``."""
    _same_setting(q_env, q2)
    if (q_env.p, q_env.r, q_env.q) != (One(), q_env.run, q_env.run):
        raise ValueError("the environment quintuple must have the form 1 run {U} run G")
    n1, n2 = q_env.names(), q2.names()
    concl = q2.derive((n2[0], "run", _join("||", n1[2], n2[2]), n2[3], _join("||", n1[4], n2[4])),
                      r=q2.run, u=q2.par(q_env.u, q2.u), g=q2.par(q_env.g, q2.g))
    rep = RGReport("asymmetric", [concl])
    rep.premises.update(_quintuple_checks(q_env, "premise1", horizon, budget))
    rep.premises.update(_quintuple_checks(q2, "premise2", horizon, budget))
    rep.premises.update(_leq("G <= R'", q_env.g, q2.r, q2, horizon, budget))
    return _conclude(rep, horizon, budget)


def rule_general_env(q1: RGQuintuple, q2: RGQuintuple, s: Term, t: Term | None = None,
                     horizon: int | None = None, budget: int = DEFAULT_BUDGET) -> RGReport:
    """The isolated rule with an environment ``S`` satisfying ``S ≤ R``, ``S ≤ R′``
    and ``S‖S ≤ S``: conclude ``T S {U‖U′} Q (G‖G′)`` and the same with ``Q′``.

    ``t`` defaults to the precondition of ``q1``.
    """
    _same_setting(q1, q2)
    t = q1.p if t is None else t
    n1, n2 = q1.names(), q2.names()
    names = (_show(t, q1.frame), _show(s, q1.frame), _join("||", n1[2], n2[2]), n1[3],
             _join("||", n1[4], n2[4]))
    base = q1.derive(names, p=t, r=s, u=q1.par(q1.u, q2.u), g=q1.par(q1.g, q2.g))
    rep = RGReport("general", [base, base.derive(names[:3] + (n2[3], names[4]), q=q2.q)])
    _actions_coincide(rep, q1, q2)
    rep.premises.update(_quintuple_checks(q1, "premise1", horizon, budget))
    rep.premises.update(_quintuple_checks(q2, "premise2", horizon, budget))
    rep.premises.update(_leq("G <= R'", q1.g, q2.r, q1, horizon, budget))
    rep.premises.update(_leq("G' <= R", q2.g, q1.r, q1, horizon, budget))
    rep.premises.update(_leq("T <= P", t, q1.p, q1, horizon, budget))
    rep.premises.update(_leq("T <= P'", t, q2.p, q1, horizon, budget))
    rep.premises.update(_leq("S <= R", s, q1.r, q1, horizon, budget))
    rep.premises.update(_leq("S <= R'", s, q2.r, q1, horizon, budget))
    rep.premises.update(_leq("S||S <= S", q1.par(s, s), s, q1, horizon, budget))
    return _conclude(rep, horizon, budget)


def rule_sequential(q1: RGQuintuple, q2: RGQuintuple, horizon: int | None = None,
                    budget: int = DEFAULT_BUDGET) -> RGReport:
    """From ``P R {U} Q G``, ``P′ R′ {U′} Q′ G′``, ``Q ≤ P′`` and
    ``(R‖U)·(R′‖U′) ≡ (R·R′)‖(U·U′)`` conclude ``P (R·R′) {U·U′} Q′ (G·G′)``."""
    _same_setting(q1, q2)
    n1, n2 = q1.names(), q2.names()
    names = (n1[0], _join(".", n1[1], n2[1]), _join(".", n1[2], n2[2]), n2[3],
             _join(".", n1[4], n2[4]))
    concl = q1.derive(names, r=Seq(q1.r, q2.r), u=Seq(q1.u, q2.u), q=q2.q, g=Seq(q1.g, q2.g))
    rep = RGReport("sequential", [concl])
    rep.premises.update(_quintuple_checks(q1, "premise1", horizon, budget))
    rep.premises.update(_quintuple_checks(q2, "premise2", horizon, budget))
    rep.premises.update(_leq("Q <= P'", q1.q, q2.p, q1, horizon, budget))
    lhs = Seq(q1.par(q1.r, q1.u), q1.par(q2.r, q2.u))
    rhs = q1.par(Seq(q1.r, q2.r), Seq(q1.u, q2.u))
    rep.premises["(R||U).(R'||U') == (R.R')||(U.U')"] = check_terms(
        lhs, rhs, q1.alphabet, horizon, budget, both=True)
    return _conclude(rep, horizon, budget)


# -- scenario files ----------------------------------------------------------------

class ScenarioError(ValueError):
    def __init__(self, msg: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


@dataclass
class ScenarioReport:
    rules: list[tuple[str, RGReport]] = field(default_factory=list)
    checks: list[tuple[str, CheckResult]] = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        return Verdict.worst([r.verdict for _, r in self.rules] + [c.status for _, c in self.checks])

    def lines(self) -> list[str]:
        out = []
        for label, rep in self.rules:
            out += rep.lines(label)
        out += [f"CHECK {text} -> {r.status.value}" for text, r in self.checks]
        return out


def _substitute(t: Term, defs: Mapping[str, Term]) -> Term:
    """Replace actions named like a definition by that definition."""
    if isinstance(t, Act):
        return defs.get(t.name, t)
    if isinstance(t, Star):
        return Star(_substitute(t.body, defs))
    if isinstance(t, (Plus, Seq)):
        return type(t)(_substitute(t.left, defs), _substitute(t.right, defs))
    if isinstance(t, PChoice):
        return PChoice(_substitute(t.left, defs), t.p, _substitute(t.right, defs))
    if isinstance(t, Par):
        return Par(_substitute(t.left, defs), t.frame, _substitute(t.right, defs))
    return t


_SLOTS = re.compile(r"^(\S+)\s+(\S+)\s+\{\s*(\S+)\s*\}\s+(\S+)\s+(\S+)$")


def run_scenario(text: str, horizon: int | None = None, budget: int = DEFAULT_BUDGET
                 ) -> ScenarioReport:
    """Run a scenario file.

    Besides the term-file header and ``def`` lines a scenario has::

        frame a b                       # optional, default all external actions
        quintuple NAME = P R {U} Q G    # slots: run, or terms without spaces
        holds NAME
        rule asymmetric premise1=NAME premise2=NAME
        rule concurrent premise1=NAME premise2=NAME T=SLOT
        rule general premise1=NAME premise2=NAME S=SLOT T=SLOT
        rule sequential premise1=NAME premise2=NAME
        check EXPR <= EXPR              # or ==; definitions may appear in EXPR

    Definition names must differ from action names.
    """
    try:
        tf = parse_term_file(text, ("frame", "quintuple", "holds", "rule", "check"))
    except TermSyntaxError as e:
        raise ScenarioError(e.msg, e.line) from None
    al, defs = tf.alphabet, tf.defs
    clash = set(defs) & al.actions
    if clash:
        raise ScenarioError(f"definition names clash with actions: {sorted(clash)}")
    frame = al.external
    quints: dict[str, RGQuintuple] = {}
    report = ScenarioReport()

    def slot(word: str, line: int) -> Term:
        if word == "0":
            return Zero()
        if word == "1":
            return One()
        if word == "run":
            return Run(frame)
        return expr(word, line)

    def expr(text: str, line: int) -> Term:
        try:
            t = _substitute(parse_term(text), defs)
        except TermSyntaxError as e:
            raise ScenarioError(e.msg, line) from None
        unknown = term_actions(t) - al.actions
        if unknown:
            raise ScenarioError(f"unknown names {sorted(unknown)}", line)
        return t

    def quint(word: str, line: int) -> RGQuintuple:
        if word not in quints:
            raise ScenarioError(f"unknown quintuple {word!r}", line)
        return quints[word]

    for line, kw, rest in tf.extra:
        if kw == "frame":
            if quints:
                raise ScenarioError("frame must precede quintuples", line)
            frame = frozenset(rest.split())
            if not frame <= al.external:
                raise ScenarioError("frame must contain external actions only", line)
        elif kw == "quintuple":
            name, eq, body = rest.partition("=")
            m = _SLOTS.match(body.strip())
            if not eq or not m or not name.strip():
                raise ScenarioError("expected 'quintuple NAME = P R {U} Q G'", line)
            words = m.groups()
            quints[name.strip()] = RGQuintuple(*(slot(w, line) for w in words), alphabet=al,
                                               frame=frame, labels=words)
        elif kw == "holds":
            report.rules.append((f"holds {rest}", holds(quint(rest, line), horizon, budget)))
        elif kw == "rule":
            words = rest.split()
            if not words:
                raise ScenarioError("rule needs a name", line)
            args = {}
            for w in words[1:]:
                k, eq, v = w.partition("=")
                if not eq:
                    raise ScenarioError(f"expected KEY=VALUE, found {w!r}", line)
                args[k] = v
            kind = words[0]
            need = {"asymmetric": {"premise1", "premise2"}, "sequential": {"premise1", "premise2"},
                    "concurrent": {"premise1", "premise2", "T"},
                    "general": {"premise1", "premise2", "S", "T"}}.get(kind)
            if need is None:
                raise ScenarioError(f"unknown rule {kind!r}", line)
            if set(args) != need:
                raise ScenarioError(f"rule {kind} takes {sorted(need)}", line)
            q1, q2 = quint(args["premise1"], line), quint(args["premise2"], line)
            if kind == "asymmetric":
                try:
                    rep = rule_asymmetric(q1, q2, horizon, budget)
                except ValueError as e:
                    raise ScenarioError(str(e), line) from None
            elif kind == "sequential":
                rep = rule_sequential(q1, q2, horizon, budget)
            elif kind == "concurrent":
                rep = rule_concurrent_isolated(q1, q2, slot(args["T"], line), horizon, budget)
            else:
                rep = rule_general_env(q1, q2, slot(args["S"], line), slot(args["T"], line),
                                       horizon, budget)
            report.rules.append((rest.split()[0], rep))
        else:  # check
            op = "==" if "==" in rest else "<=" if "<=" in rest else None
            if op is None:
                raise ScenarioError("expected 'check EXPR <= EXPR' or 'check EXPR == EXPR'", line)
            left, right = rest.split(op, 1)
            a, b = expr(left, line), expr(right, line)
            res = check_terms(a, b, al, horizon, budget, both=op == "==")
            report.checks.append((f"{left.strip()} {op} {right.strip()}", res))
    return report


# -- the vending machine -----------------------------------------------------------

def _data(name: str) -> str:
    return resources.files("pcka").joinpath("data", name).read_text()


def vending_machine_case_study(horizon: int | None = None,
                               budget: int = DEFAULT_BUDGET) -> ScenarioReport:
    """Run the bundled vending-machine scenario (``vending.rg``)."""
    return run_scenario(_data("vending.rg"), horizon, budget)


def branch_weights(p: ProbAutomaton, first: str) -> Dist:
    """Distribution reached after the ``first`` action and any deterministic tau chain.

    For ``coin·(A +[p] B)`` this is the split ``p / 1-p`` between the copies
    of ``A`` and ``B``.
    """
    (t,) = [t for x in p.initial.support for t in p.out(x) if t.action == first]
    d = t.target
    while d.is_point():
        (x,) = d.support
        outs = p.out(x)
        if len(outs) != 1 or not p.alphabet.is_unobservable(outs[0].action):
            break
        d = outs[0].target
    return d


def can_perform(p: ProbAutomaton, state: int, trace: Iterable[str]) -> bool:
    """Whether some path from ``state`` shows ``trace`` as its visible actions."""
    def closure(xs):
        seen, todo = set(xs), list(xs)
        while todo:
            x = todo.pop()
            for t in p.out(x):
                if p.alphabet.is_unobservable(t.action):
                    for y in t.target.support - seen:
                        seen.add(y)
                        todo.append(y)
        return seen

    cur = closure({state})
    for a in trace:
        cur = closure({y for x in cur for t in p.out(x) if t.action == a for y in t.target.support})
        if not cur:
            return False
    return True
