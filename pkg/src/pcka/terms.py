"""Algebraic terms: AST, parser, pretty-printer and compiler to automata.

Concrete syntax, loosest binding first::

    t + u        t +[p] u       (same level; mixing the two needs parentheses)
    t ||{a,b} u  parallel composition synchronising on a, b
    t . u        sequential composition
    t*           Kleene star (postfix)
    0  1  a  run{a,b}  (t)

All binary operators associate to the left.  Every identifier is an action.
A term file starts with ``external``/``internal`` declarations followed by
``def NAME = EXPR`` lines; indented lines continue the previous line and
``#`` starts a comment.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction

from . import automata as A
from .automata import ActionAlphabet, ProbAutomaton

__all__ = [
    "Term", "Zero", "One", "Act", "Plus", "Seq", "Star", "PChoice", "Par", "Run",
    "TermSyntaxError", "parse", "parse_term", "parse_term_file", "TermFile", "pretty",
    "compile_term", "least_fixpoint_star", "term_size", "term_actions",
]


class Term:
    """Base class of term nodes; nodes are immutable and compare structurally."""

    __slots__ = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, repr=False)
class Zero(Term):
    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True, repr=False)
class One(Term):
    def __repr__(self):
        return "One()"


@dataclass(frozen=True)
class Act(Term):
    name: str


@dataclass(frozen=True)
class Plus(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Seq(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Star(Term):
    body: Term


@dataclass(frozen=True)
class PChoice(Term):
    left: Term
    p: Fraction
    right: Term


@dataclass(frozen=True)
class Par(Term):
    left: Term
    frame: frozenset
    right: Term


@dataclass(frozen=True)
class Run(Term):
    actions: frozenset


class TermSyntaxError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg, self.line, self.col = msg, line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + msg)


# -- lexer -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<pc>\+\[(?P<prob>[^\]]*)\])
  | (?P<par>\|\|)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>[+.*(){},])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str, line0: int = 1, col0: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    line, col_base = line0, col0 - 1
    while pos < len(text):
        if text[pos] == "\n":
            line += 1
            col_base = -pos - 1
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", line, pos + col_base + 1)
        kind = m.lastgroup if m.lastgroup != "prob" else "pc"
        if m.group("pc") is not None:
            kind = "pc"
        if kind != "ws":
            toks.append(_Tok(kind, m.group(0), line, pos + col_base + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, len(text) + col_base + 1))
    return toks


# -- parser ------------------------------------------------------------------

def _prob(text: str, tok: _Tok) -> Fraction:
    try:
        p = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise TermSyntaxError(f"bad probability {text!r}", tok.line, tok.col) from None
    if not 0 <= p <= 1:
        raise TermSyntaxError(f"probability {p} outside [0,1]", tok.line, tok.col)
    return p


class _Parser:
    def __init__(self, toks: list[_Tok], alphabet: ActionAlphabet | None):
        self.toks = toks
        self.i = 0
        self.alphabet = alphabet

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> TermSyntaxError:
        tok = tok or self.tok
        return TermSyntaxError(msg, tok.line, tok.col)

    def eat(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind not in ("op", "par"):
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def action(self, tok: _Tok, external_only: bool = False) -> str:
        name = tok.text
        if self.alphabet is not None:
            ok = self.alphabet.external if external_only else self.alphabet.actions
            if name not in ok:
                kind = "external action" if external_only else "action"
                raise self.error(f"undeclared {kind} {name!r}", tok)
        return name

    def action_set(self, external_only: bool) -> frozenset:
        self.eat("{")
        names = []
        if self.tok.text != "}":
            while True:
                if self.tok.kind != "ident":
                    raise self.error("expected an action name")
                names.append(self.action(self.tok, external_only))
                self.i += 1
                if self.tok.text != ",":
                    break
                self.i += 1
        self.eat("}")
        return frozenset(names)

    def choice(self) -> Term:
        left = self.par()
        kind = None
        while self.tok.kind == "pc" or (self.tok.kind == "op" and self.tok.text == "+"):
            tok = self.tok
            now = "pc" if tok.kind == "pc" else "plus"
            if kind is not None and now != kind:
                raise self.error("mixing + and +[p] needs parentheses", tok)
            kind = now
            self.i += 1
            right = self.par()
            if now == "plus":
                left = Plus(left, right)
            else:
                left = PChoice(left, _prob(tok.text[2:-1], tok), right)
        return left

    def par(self) -> Term:
        left = self.seq()
        while self.tok.kind == "par":
            self.i += 1
            frame = self.action_set(external_only=True)
            left = Par(left, frame, self.seq())
        return left

    def seq(self) -> Term:
        left = self.postfix()
        while self.tok.kind == "op" and self.tok.text == ".":
            self.i += 1
            left = Seq(left, self.postfix())
        return left

    def postfix(self) -> Term:
        t = self.atom()
        while self.tok.kind == "op" and self.tok.text == "*":
            self.i += 1
            t = Star(t)
        return t

    def atom(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            if tok.text == "0":
                return Zero()
            if tok.text == "1":
                return One()
            raise self.error(f"only 0 and 1 are constants, found {tok.text!r}", tok)
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "run" and self.tok.text == "{":
                acts = self.action_set(external_only=True)
                if not acts:
                    raise self.error("run needs a nonempty action set", tok)
                return Run(acts)
            return Act(self.action(tok))
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            t = self.choice()
            self.eat(")")
            return t
        raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")


def parse_term(text: str, alphabet: ActionAlphabet | None = None, *, line: int = 1,
               col: int = 1) -> Term:
    """Parse one expression; with ``alphabet`` every action must be declared."""
    p = _Parser(_lex(text, line, col), alphabet)
    t = p.choice()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return t


@dataclass
class TermFile:
    alphabet: ActionAlphabet
    defs: dict[str, Term]
    # lines starting with a keyword the caller asked for: (line number, keyword, rest)
    extra: list[tuple[int, str, str]] = field(default_factory=list)


def _logical_lines(text: str) -> Iterator[tuple[int, int, str]]:
    """``(line, column offset, text)`` with comments removed and continuations joined."""
    cur: list | None = None
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if body[0] in " \t" and cur is not None:
            cur[2] += "\n" + body
            continue
        if cur is not None:
            yield tuple(cur)
        cur = [n, 1, body]
    if cur is not None:
        yield tuple(cur)


def _names(rest: str, line: int) -> list[str]:
    out = [w for w in re.split(r"[\s,]+", rest.strip()) if w]
    for w in out:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", w):
            raise TermSyntaxError(f"bad action name {w!r}", line, 1)
    return out


def parse_term_file(text: str, extra_keywords: Iterable[str] = ()) -> TermFile:
    extra_keywords = set(extra_keywords)
    external: list[str] = []
    internal: list[str] = []
    defs: dict[str, Term] = {}
    extra = []
    alphabet: ActionAlphabet | None = None
    for line, _, body in _logical_lines(text):
        kw, _, rest = body.strip().partition(" ")
        if kw in ("external", "internal"):
            if alphabet is not None:
                raise TermSyntaxError("action declarations must precede definitions", line, 1)
            (external if kw == "external" else internal).extend(_names(rest, line))
        elif kw == "def":
            if alphabet is None:
                try:
                    alphabet = ActionAlphabet(external, internal)
                except A.AutomatonError as e:
                    raise TermSyntaxError(str(e), line, 1) from None
            m = re.match(r"\s*def\s+([A-Za-z_][A-Za-z0-9_']*)\s*=", body)
            if not m:
                raise TermSyntaxError("expected 'def NAME = EXPR'", line, 1)
            name = m.group(1)
            if name in defs:
                raise TermSyntaxError(f"duplicate definition {name!r}", line, 1)
            prefix = body[:m.end()]
            defs[name] = parse_term(body[m.end():], alphabet, line=line, col=len(prefix) + 1)
        elif kw in extra_keywords:
            extra.append((line, kw, rest.strip()))
        else:
            raise TermSyntaxError(f"unknown directive {kw!r}", line, 1)
    if alphabet is None:
        alphabet = ActionAlphabet(external, internal)
    return TermFile(alphabet, defs, extra)


def parse(text: str) -> tuple[ActionAlphabet, dict[str, Term]]:
    """Parse a term file into its alphabet and named terms."""
    tf = parse_term_file(text)
    return tf.alphabet, tf.defs


# -- pretty-printing -----------------------------------------------------------

_CHOICE, _PAR, _SEQ, _STAR, _ATOM = range(1, 6)


def _level(t: Term) -> int:
    if isinstance(t, (Plus, PChoice)):
        return _CHOICE
    if isinstance(t, Par):
        return _PAR
    if isinstance(t, Seq):
        return _SEQ
    if isinstance(t, Star):
        return _STAR
    return _ATOM


def _fmt_p(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def _wrap(t: Term, parens: bool) -> str:
    s = pretty(t)
    return f"({s})" if parens else s


def pretty(t: Term) -> str:
    """Concrete syntax with the minimum of parentheses."""
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Act):
        return t.name
    if isinstance(t, Run):
        return "run{" + ",".join(sorted(t.actions)) + "}"
    if isinstance(t, Star):
        return _wrap(t.body, _level(t.body) < _STAR) + "*"
    if isinstance(t, Seq):
        return f"{_wrap(t.left, _level(t.left) < _SEQ)} . {_wrap(t.right, _level(t.right) <= _SEQ)}"
    if isinstance(t, Par):
        frame = "{" + ",".join(sorted(t.frame)) + "}"
        return (f"{_wrap(t.left, _level(t.left) < _PAR)} ||{frame} "
                f"{_wrap(t.right, _level(t.right) <= _PAR)}")
    if isinstance(t, Plus):
        return (f"{_wrap(t.left, _level(t.left) < _CHOICE or isinstance(t.left, PChoice))} + "
                f"{_wrap(t.right, _level(t.right) <= _CHOICE)}")
    if isinstance(t, PChoice):
        return (f"{_wrap(t.left, _level(t.left) < _CHOICE or isinstance(t.left, Plus))} "
                f"+[{_fmt_p(t.p)}] {_wrap(t.right, _level(t.right) <= _CHOICE)}")
    raise TypeError(f"not a term: {t!r}")


# -- compilation ---------------------------------------------------------------

def compile_term(t: Term, alphabet: ActionAlphabet) -> ProbAutomaton:
    """Structural compilation; each node becomes the matching automaton construction."""
    if isinstance(t, Zero):
        return A.deadlock(alphabet)
    if isinstance(t, One):
        return A.skip(alphabet)
    if isinstance(t, Act):
        return A.action(t.name, alphabet)
    if isinstance(t, Run):
        return A.run(t.actions, alphabet)
    if isinstance(t, Star):
        return A.star(compile_term(t.body, alphabet))
    if isinstance(t, Plus):
        return A.plus(compile_term(t.left, alphabet), compile_term(t.right, alphabet))
    if isinstance(t, Seq):
        return A.seq(compile_term(t.left, alphabet), compile_term(t.right, alphabet))
    if isinstance(t, PChoice):
        return A.pchoice(compile_term(t.left, alphabet), t.p, compile_term(t.right, alphabet))
    if isinstance(t, Par):
        return A.par(compile_term(t.left, alphabet), t.frame, compile_term(t.right, alphabet))
    raise TypeError(f"not a term: {t!r}")


def least_fixpoint_star(body: Term) -> Term:
    """``body*·0``, the least solution of ``X = body·X·0``."""
    return Seq(Star(body), Zero())


def term_size(t: Term) -> int:
    """Number of AST nodes."""
    if isinstance(t, (Zero, One, Act, Run)):
        return 1
    if isinstance(t, Star):
        return 1 + term_size(t.body)
    return 1 + term_size(t.left) + term_size(t.right)


def term_actions(t: Term) -> frozenset:
    if isinstance(t, Act):
        return frozenset([t.name])
    if isinstance(t, Run):
        return t.actions
    if isinstance(t, Star):
        return term_actions(t.body)
    if isinstance(t, (Zero, One)):
        return frozenset()
    extra = t.frame if isinstance(t, Par) else frozenset()
    return term_actions(t.left) | term_actions(t.right) | extra
