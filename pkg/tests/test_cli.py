import os
import subprocess
import sys
from pathlib import Path

import pytest

from pcka.cli import main
from pcka.laws import DEFAULT_ALPHABET, random_terms
from pcka.simulation import equiv
from pcka.terms import compile_term, pretty
from pcka.textio import load_automaton

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def golden(name, text):
    path = GOLDEN / name
    if os.environ.get("PCKA_REGOLD"):
        path.write_text(text)
    assert text == path.read_text()


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for v in ("PCKA_HORIZON", "PCKA_BUDGET", "PCKA_SEED"):
        monkeypatch.delenv(v, raising=False)


def test_check_sim_with_witness(capsys):
    code, out, _ = run(capsys, "check-sim", "fig2_M.aut", "fig2_H.aut",
                       "--witness", "fig2_S_completed.rel")
    assert code == 0
    golden("check_sim_witness.txt", out)


def test_check_sim_printed_witness(capsys):
    code, out, _ = run(capsys, "check-sim", "fig2_M.aut", "fig2_H.aut", "--witness",
                       "fig2_S.rel", "--horizon", "6")
    assert code == 1
    golden("check_sim_printed.txt", out)


def test_check_sim_search(capsys, tmp_path):
    rel = tmp_path / "s.rel"
    code, out, _ = run(capsys, "check-sim", "fig2_M.aut", "fig2_H.aut", "--format", "summary",
                       "--out", str(rel))
    assert code == 0
    golden("check_sim_search.txt", out)
    code, _, _ = run(capsys, "check-sim", "fig2_M.aut", "fig2_H.aut", "--witness", str(rel))
    assert code == 0


def test_check_sim_refuted(capsys):
    code, out, _ = run(capsys, "check-sim", "fig2_H.aut", "fig2_M.aut")
    assert code == 1
    golden("check_sim_refuted.txt", out)


def test_term_file_operands(capsys):
    code, _, _ = run(capsys, "check-sim", "vending.terms:M", "vending.terms:H")
    assert code == 0


def test_compile_zero(capsys, tmp_path):
    src = tmp_path / "z.terms"
    src.write_text("external a\ndef Z = 0\n")
    code, out, _ = run(capsys, "compile", str(src))
    assert code == 0
    golden("compile_zero.aut", out)
    p = load_automaton(out)
    assert len(p.states) == 1 and not p.transitions


def test_compile_m(capsys):
    code, out, _ = run(capsys, "compile", "vending.terms", "M")
    assert code == 0
    golden("compile_m.aut", out)
    fig = load_automaton((Path(__file__).parents[1] / "src/pcka/data/fig2_M.aut").read_text())
    assert equiv(load_automaton(out), fig).verified


def test_compile_round_trip(capsys, tmp_path):
    src = tmp_path / "r.terms"
    for i, t in enumerate(random_terms(5, 50, 3)):
        src.write_text(f"external a b c\ndef T = {pretty(t)}\n")
        code, out, _ = run(capsys, "compile", str(src))
        assert code == 0
        assert equiv(load_automaton(out), compile_term(t, DEFAULT_ALPHABET)).verified, i


def test_compile_errors(capsys, tmp_path):
    src = tmp_path / "bad.terms"
    src.write_text("external a\ndef X = a +\n")
    code, _, err = run(capsys, "compile", str(src))
    assert code == 3 and "line 2" in err
    code, _, err = run(capsys, "compile", "vending.terms")
    assert code == 3 and "name one of" in err
    code, _, err = run(capsys, "compile", "vending.terms", "Nope")
    assert code == 3
    code, _, err = run(capsys, "compile", str(tmp_path / "missing.terms"))
    assert code == 3 and "no such file" in err


def test_laws_catalog(capsys):
    code, out, _ = run(capsys, "laws", "--law", "interchange-eq")
    assert code == 1
    golden("laws_interchange_eq.txt", out)


def test_laws_seeded(capsys):
    code, out, _ = run(capsys, "laws", "--law", "plus-comm", "--law", "pc-dist", "--count", "3",
                       "--seed", "42")
    assert code == 0
    golden("laws_seed42.txt", out)
    code2, out2, _ = run(capsys, "laws", "--law", "plus-comm", "--law", "pc-dist", "--count",
                         "3", "--seed", "42")
    assert (code2, out2) == (code, out)


def test_laws_env_seed(capsys, monkeypatch):
    _, by_flag, _ = run(capsys, "laws", "--law", "seq-assoc", "--count", "2", "--seed", "9")
    monkeypatch.setenv("PCKA_SEED", "9")
    _, by_env, _ = run(capsys, "laws", "--law", "seq-assoc", "--count", "2")
    assert by_env == by_flag
    monkeypatch.setenv("PCKA_SEED", "1")
    _, flag_wins, _ = run(capsys, "laws", "--law", "seq-assoc", "--count", "2", "--seed", "9")
    assert flag_wins == by_flag


def test_laws_usage(capsys):
    assert run(capsys, "laws")[0] == 3
    assert run(capsys, "laws", "--law", "no-such-law")[0] == 3
    assert run(capsys, "laws", "--all", "--count", "0")[0] == 3


def test_rg_vending(capsys):
    code, out, _ = run(capsys, "rg", "vending.rg")
    assert code == 0
    golden("rg_vending.txt", out)


def test_rg_summary(capsys):
    code, out, _ = run(capsys, "rg", "vending.rg", "--format", "summary")
    assert code == 0
    golden("rg_vending_summary.txt", out)


def test_dot(capsys):
    code, out, _ = run(capsys, "dot", "fig2_M.aut")
    assert code == 0
    golden("dot_m.dot", out)


@pytest.mark.parametrize("argv", [
    ["check-sim", "fig2_M.aut", "fig2_H.aut", "--budget", "0"],
    ["check-sim", "fig2_M.aut", "fig2_H.aut", "--horizon", "-2"],
    ["check-sim", "fig2_M.aut", "fig2_H.aut", "--horizon", "x"],
    ["check-sim", "fig2_M.aut"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_3(capsys, argv):
    with pytest.raises(SystemExit) as e:
        sys.exit(main(argv))
    assert e.value.code == 3


def test_env_bound_checked(capsys, monkeypatch):
    monkeypatch.setenv("PCKA_BUDGET", "-1")
    assert run(capsys, "check-sim", "fig2_M.aut", "fig2_H.aut")[0] == 3
    monkeypatch.setenv("PCKA_BUDGET", "1")
    # a flag overrides the environment
    assert run(capsys, "check-sim", "fig2_M.aut", "fig2_H.aut", "--budget", "10000")[0] == 0


def test_mismatched_alphabets(capsys, tmp_path):
    other = tmp_path / "a.aut"
    other.write_text("automaton A\nexternal a\nstates s\ninit s:1\n")
    code, _, err = run(capsys, "check-sim", "fig2_M.aut", str(other))
    assert code == 3 and "alphabets" in err


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "pcka.cli", "check-sim", "fig2_H.aut",
                          "fig2_M.aut"], capture_output=True, text=True)
    assert res.returncode == 1 and res.stdout.startswith("SIM H <= M")


def test_stdin_pipe():
    compiled = subprocess.run([sys.executable, "-m", "pcka.cli", "compile", "vending.terms", "M"],
                              capture_output=True, text=True, check=True).stdout
    res = subprocess.run([sys.executable, "-m", "pcka.cli", "dot", "-"], input=compiled,
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith('digraph "M"')
