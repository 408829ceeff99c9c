"""Command-line front end.

Exit status: 0 Verified, 1 Refuted, 2 Inconclusive, 3 usage, file or format
errors.  ``--horizon``, ``--budget`` and ``--seed`` fall back to the
``PCKA_HORIZON``, ``PCKA_BUDGET`` and ``PCKA_SEED`` environment variables.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .automata import ProbAutomaton, reachable
from .dot import to_dot
from .laws import (DEFAULT_ALPHABET, check_law, counterexample_catalog, law_instances,
                   law_registry, run_catalog_entry)
from .rg import ScenarioError, run_scenario
from .simulation import CheckResult, RelationError, Verdict, find_simulation, verify_simulation
from .terms import TermSyntaxError, compile_term, parse_term_file
from .textio import FormatError, dump_automaton, dump_relation, load_automaton, load_relation

USAGE = 3
DEFAULT_BUDGET = 10000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Config:
    horizon: int | None
    budget: int
    seed: int
    out: Path | None
    format: str


def _bound(name: str, flag, env: str, default):
    raw = flag if flag is not None else os.environ.get(env)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None
    if value <= 0 and name != "seed":
        raise UsageError(f"{name} must be positive, got {value}")
    if name == "seed" and not 0 <= value < 2 ** 64:
        raise UsageError("seed must fit in 64 bits")
    return value


def _config(args) -> Config:
    return Config(_bound("horizon", args.horizon, "PCKA_HORIZON", None),
                  _bound("budget", args.budget, "PCKA_BUDGET", DEFAULT_BUDGET),
                  _bound("seed", args.seed, "PCKA_SEED", 0),
                  Path(args.out) if args.out else None, args.format)


# -- inputs ------------------------------------------------------------------------

def _read(path: str) -> str:
    """A file, ``-`` for stdin, or failing that a bundled example of that name."""
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    bundled = resources.files("pcka").joinpath("data", path)
    if "/" not in path and bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise UsageError(f"no such file: {path}")


def _is_automaton(text: str) -> bool:
    for raw in text.splitlines():
        words = raw.split("#", 1)[0].split()
        if words:
            return words[0] == "automaton"
    return False


def _compile_named(text: str, name: str | None, where: str) -> ProbAutomaton:
    tf = parse_term_file(text)
    if name is None:
        if len(tf.defs) != 1:
            raise UsageError(f"{where} defines {len(tf.defs)} terms; name one of "
                             + ", ".join(sorted(tf.defs)))
        (name,) = tf.defs
    if name not in tf.defs:
        raise UsageError(f"{where} has no definition {name!r}")
    p = reachable(compile_term(tf.defs[name], tf.alphabet))
    p.name = name
    return p


def _load(spec: str) -> ProbAutomaton:
    """``FILE`` (automaton or single-term file) or ``FILE:NAME`` (term file)."""
    path, name = spec, None
    if not Path(spec).is_file() and ":" in spec:
        path, name = spec.rsplit(":", 1)
    text = _read(path)
    if _is_automaton(text):
        if name is not None:
            raise UsageError(f"{path} is an automaton file; drop ':{name}'")
        return load_automaton(text)
    return _compile_named(text, name, path)


def _emit(cfg: Config, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text, encoding="utf-8")


def _summary(**fields) -> str:
    return "".join(f"{k}={v}\n" for k, v in fields.items())


# -- commands ----------------------------------------------------------------------

def cmd_compile(args, cfg: Config) -> int:
    p = _compile_named(_read(args.file), args.name, args.file)
    _emit(cfg, dump_automaton(p))
    return 0


def cmd_dot(args, cfg: Config) -> int:
    _emit(cfg, to_dot(_load(args.file)))
    return 0


def _sim_report(res: CheckResult, p: ProbAutomaton, q: ProbAutomaton, mode: str,
                cfg: Config) -> str:
    if cfg.format == "summary":
        fields = dict(command="check-sim", left=p.name, right=q.name, mode=mode,
                      verdict=res.status.value, exit=res.status.exit_code)
        if res.relation is not None:
            fields["pairs"] = len(res.relation.pairs)
        if res.reason:
            fields["reason"] = res.reason
        return _summary(**fields)
    return f"SIM {p.name} <= {q.name} [{mode}] -> {res.summary(p, q)}\n"


def cmd_check_sim(args, cfg: Config) -> int:
    p, q = _load(args.left), _load(args.right)
    if p.alphabet != q.alphabet:
        raise UsageError("left and right automata have different alphabets")
    if args.witness:
        rel = load_relation(_read(args.witness), p, q)
        res, mode = verify_simulation(rel, p, q, cfg.horizon), "witness"
    else:
        res, mode = find_simulation(p, q, cfg.horizon, cfg.budget), "search"
    sys.stdout.write(_sim_report(res, p, q, mode, cfg))
    if cfg.out is not None and res.verified:
        cfg.out.write_text(dump_relation(res.relation, p, q), encoding="utf-8")
    return res.status.exit_code


def _law_ids(args) -> list[str]:
    ids = [law.id for law in law_registry()] if args.all else []
    for name in args.law or []:
        if name not in ids:
            ids.append(name)
    if not ids:
        raise UsageError("give --law ID (repeatable) or --all")
    return ids


def cmd_laws(args, cfg: Config) -> int:
    catalog = {e.id: e for e in counterexample_catalog()}
    known = {law.id for law in law_registry()}
    ids = _law_ids(args)
    for name in ids:
        if name not in known and name not in catalog:
            raise UsageError(f"unknown law {name!r}")
    lines: list[str] = []
    tally = {v: 0 for v in Verdict}
    for name in ids:
        if name in catalog:
            false_dir, true_dir = run_catalog_entry(catalog[name], cfg.horizon, cfg.budget)
            lines.append(f"CATALOG {name} claimed <= -> {false_dir.status.value}")
            lines.append(f"CATALOG {name} converse <= -> {true_dir.status.value}")
            tally[false_dir.status] += 1
            tally[true_dir.status] += 1
            continue
        for i, operands, params in law_instances(name, cfg.seed, args.count):
            rep = check_law(name, operands, DEFAULT_ALPHABET, params, seed=cfg.seed, index=i,
                            horizon=cfg.horizon, budget=cfg.budget)
            lines += rep.lines()
            for r in rep.results.values():
                tally[r.status] += 1
    worst = Verdict.worst(v for v, n in tally.items() if n)
    if cfg.format == "summary":
        text = _summary(command="laws", seed=cfg.seed, count=args.count, laws=len(ids),
                        verified=tally[Verdict.VERIFIED], refuted=tally[Verdict.REFUTED],
                        inconclusive=tally[Verdict.INCONCLUSIVE], verdict=worst.value,
                        exit=worst.exit_code)
    else:
        text = "\n".join(lines) + (
            f"\nSUMMARY verified={tally[Verdict.VERIFIED]} refuted={tally[Verdict.REFUTED]}"
            f" inconclusive={tally[Verdict.INCONCLUSIVE]}\n")
    _emit(cfg, text)
    return worst.exit_code


def cmd_rg(args, cfg: Config) -> int:
    rep = run_scenario(_read(args.scenario), cfg.horizon, cfg.budget)
    if cfg.format == "summary":
        text = _summary(command="rg", scenario=args.scenario, rules=len(rep.rules),
                        checks=len(rep.checks), verdict=rep.verdict.value,
                        exit=rep.verdict.exit_code)
    else:
        text = "\n".join(rep.lines() + [f"RESULT {rep.verdict.value}"]) + "\n"
    _emit(cfg, text)
    return rep.verdict.exit_code


# -- argument parsing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--horizon", help="weak-transition depth bound (default 2*|states|)")
    common.add_argument("--budget", help=f"obligation cap for search (default {DEFAULT_BUDGET})")
    common.add_argument("--seed", help="random seed for law instances (default 0)")
    common.add_argument("--out", help="write the result to this file")
    common.add_argument("--format", choices=("text", "summary"), default="text",
                        help="text report or key=value summary")

    parser = _Parser(prog="pcka", description="Probabilistic automata and simulation checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", parents=[common], help="compile a term file to an automaton")
    p.add_argument("file")
    p.add_argument("name", nargs="?", help="definition to compile (optional if only one)")
    p.set_defaults(run=cmd_compile)

    p = sub.add_parser("check-sim", parents=[common], help="check LEFT <= RIGHT")
    p.add_argument("left", help="automaton file, single-term file, or TERMFILE:NAME")
    p.add_argument("right")
    p.add_argument("--witness", help="relation file to verify instead of searching")
    p.set_defaults(run=cmd_check_sim)

    p = sub.add_parser("laws", parents=[common], help="check algebraic laws on random instances")
    p.add_argument("--law", action="append", help="law or catalog id (repeatable)")
    p.add_argument("--all", action="store_true", help="every law in the registry")
    p.add_argument("--count", type=int, default=20, help="instances per law (default 20)")
    p.set_defaults(run=cmd_laws)

    p = sub.add_parser("rg", parents=[common], help="run a rely/guarantee scenario")
    p.add_argument("scenario")
    p.set_defaults(run=cmd_rg)

    p = sub.add_parser("dot", parents=[common], help="render an automaton as Graphviz DOT")
    p.add_argument("file", help="automaton file, single-term file, or TERMFILE:NAME")
    p.set_defaults(run=cmd_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if getattr(args, "count", 1) <= 0:
            raise UsageError("count must be positive")
        return args.run(args, cfg)
    except (UsageError, FormatError, TermSyntaxError, ScenarioError, RelationError,
            OSError) as e:
        print(f"pcka {args.command}: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
