from pathlib import Path

import pytest

from rtk import export_dot, format_model, parse_theory, run_command
from rtk.cli import main
from cli_vectors import ANIMALS, THREEBIT, TWOBIT, VECTORS


def run(*argv):
    return run_command(list(argv))


@pytest.mark.parametrize(
    ("argv", "want"),
    [(argv, want) for _, argv, want in VECTORS],
    ids=[name for name, _, _ in VECTORS],
)
def test_vector_exit_codes(argv, want):
    code, text = run_command(argv)
    assert code == want
    assert text.endswith("\n")
    assert "---" in text


# -- frozen reports for a few verbs


def test_reach_report():
    code, text = run("reach", TWOBIT, "--monoid", "FULL", "--from", "00 01", "--to", "00", "--oracle")
    assert (code, text) == (
        0,
        "reachable: yes via t2\n"
        "t2: 00->00 01->00 10->10 11->11\n"
        "---\n"
        "verdict: reachable\n"
        "witness: t2\n"
        "oracle: agree\n",
    )


def test_free_no_report():
    code, text = run("free", TWOBIT, "--monoid", "A", "--spec", "00")
    assert (code, text) == (1, "free: no\n---\nverdict: not-free\n")


def test_lumping_reports():
    code, text = run("lumping", TWOBIT, "--map", "L1")
    assert (code, text) == (
        0,
        "lumping: yes\n"
        "reduced space: 0001 1011\n"
        "e: 0001->{00 01} 1011->{10 11}\n"
        "h: 00->0001 01->0001 10->1011 11->1011\n"
        "---\n"
        "verdict: lumping\n"
        "reduced: 2\n",
    )
    code, text = run("lumping", TWOBIT, "--map", "over")
    assert code == 0
    assert "reduced space: none (classes of 10 and 00 overlap without coinciding)" in text
    assert "reduced: none" in text
    code, text = run("lumping", TWOBIT, "--map", "set1z")
    assert code == 1
    assert "lumping: no (not inflating at 10)" in text
    code, text = run("lumping", TWOBIT, "--map", "ball1")
    assert code == 1
    assert "not idempotent at 00" in text


def test_embed_reports():
    code, text = run("embed", TWOBIT, "--map", "inject")
    assert (code, text) == (
        0,
        "kind: intensive\n"
        "adjoint: 00->a 01->a 10->b 11->b\n"
        "---\n"
        "verdict: embedding\n"
        "kind: intensive\n",
    )
    assert run("embed", TWOBIT, "--map", "nop")[1].startswith("kind: extensive\n")
    code, text = run("embed", TWOBIT, "--map", "genmap")
    assert code == 0
    assert text.startswith("kind: general\n")
    assert "adjoint" not in text
    code, text = run("embed", TWOBIT, "--map", "notemb")
    assert code == 1
    assert "verdict: no" in text


def test_decompose_reports():
    code, text = run("decompose", TWOBIT, "--map", "genmap")
    assert code == 0
    assert "middle space: 00 01 10\n" in text
    assert "inner kind: intensive" in text
    assert "outer kind: extensive" in text
    code, text = run("decompose", TWOBIT, "--map", "genmap", "--extensive-first")
    assert code == 0
    assert "middle space: a b 11\n" in text
    assert "inner kind: extensive" in text
    assert "outer kind: intensive" in text


def test_nest_report():
    code, text = run("nest", THREEBIT, "--inner", "LA", "--outer", "LAB")
    assert code == 0
    assert "middle insertion into: 000001 010011 100101 110111\n" in text
    assert "recomposition matches direct insertion: yes\n" in text
    assert "recompose: match" in text
    code, text = run("nest", THREEBIT, "--inner", "LAB", "--outer", "LA")
    assert code == 1
    assert "outer lumping does not refine inner's" in text


def test_combine_reports():
    code, text = run("combine", TWOBIT, "--spec", "00 01", "--spec", "01 11")
    assert (code, text) == (0, "combined: {01}\n---\nverdict: ok\ncombined: {01}\n")
    code, text = run("combine", TWOBIT, "--spec", "00", "--spec", "11")
    assert code == 1
    assert text.startswith("combined: nothing (")
    assert "verdict: incompatible" in text
    code, text = run("combine", TWOBIT, "--monoid", "A", "--monoid", "B")
    assert code == 0
    assert "elements: 1" in text
    assert run("combine", TWOBIT)[0] == 2
    assert run("combine", TWOBIT, "--spec", "00", "--monoid", "A")[0] == 2


def test_quotient_report_with_dot():
    code, text = run(
        "quotient", TWOBIT, "--monoid", "A",
        "--spec", "00", "--spec", "01", "--spec", "10", "--spec", "11",
        "--dot", "-",
    )
    assert code == 0
    assert "class 0: {00} {10}\n" in text
    assert "class 1: {01} {11}\n" in text
    assert "class 2: {00 01 10 11}\n" in text
    assert "free class: [{00 01 10 11}]\n" in text
    assert "classes: 3" in text
    assert '"[{00}]" -> "[{00 01 10 11}]";' in text
    assert '"[{01}]" -> "[{00 01 10 11}]";' in text
    assert "rankdir=BT;" in text


def test_restrict_and_effective_reports():
    code, text = run("restrict", TWOBIT, "--monoid", "FULL", "--sub", "A", "--lumping", "L1")
    assert code == 0
    assert "small space: 0001 1011\n" in text
    assert "elements: 4" in text
    code, text = run(
        "effective", TWOBIT, "--monoid", "FULL", "--sub", "A",
        "--lumping", "L1", "--side", "00 11",
    )
    assert code == 0
    assert "elements: 4" in text
    code, text = run(
        "effective", TWOBIT, "--monoid", "FULL", "--sub", "A",
        "--lumping", "L1", "--side", "00 01",
    )
    assert code == 1
    assert "side resource misses" in text


def test_commutant_reports():
    code, text = run("commutant", TWOBIT, "--monoid", "FULL", "--sub", "A", "--oracle")
    assert code == 0
    assert "elements: 4" in text
    assert "oracle: agree" in text
    code, text = run("bicommutant", TWOBIT, "--monoid", "FULL", "--sub", "A", "--oracle")
    assert code == 0
    assert "complete: yes" in text
    code, text = run("bicommutant", TWOBIT, "--monoid", "FULL", "--sub", "PERM")
    assert code == 0
    assert "complete: no" in text


def test_subsystems_report():
    code, text = run("subsystems", TWOBIT, "--monoid", "A", "--dot", "-")
    assert code == 0
    assert "S0: 1 elements: t3\n" in text
    assert "S4: 4 elements: t0 t1 t2 t3\n" in text
    assert "bottom: S0\n" in text
    assert "top: S4\n" in text
    assert "systems: 5" in text
    assert '"S0" -> "S1";' in text
    assert '"S1" -> "S4";' in text
    assert '"S0" -> "S4";' not in text  # transitively reduced
    code, text = run("subsystems", TWOBIT, "--monoid", "A", "--cap", "2")
    assert code == 3
    assert "verdict: cap-exceeded" in text
    assert "count: 3" in text


def test_independence_report():
    code, text = run(
        "independence", TWOBIT, "--monoid", "FULL", "--a", "A", "--b", "B",
        "--free-composition",
    )
    assert (code, text) == (
        0,
        "agent A space: 0001 1011\n"
        "agent B space: 0010 0111\n"
        "agent A theory: 4 maps\n"
        "agent B theory: 4 maps\n"
        "certificate: ok\n"
        "freely composable: yes\n"
        "compatibility: ok\n"
        "---\n"
        "verdict: independent\n"
        "a-size: 2\n"
        "b-size: 2\n"
        "certified: yes\n"
        "freely-composable: yes\n"
        "compatible: yes\n",
    )


def test_swap_reports():
    assert run("swap", TWOBIT, "--monoid", "FULL", "--a", "A", "--b", "B", "--u", "exch") == (
        0,
        "swap: ok\n---\nverdict: swap\n",
    )
    code, text = run("swap", TWOBIT, "--monoid", "FULL", "--a", "A", "--b", "B", "--u", "exch", "--u-inv", "exch")
    assert code == 0
    code, text = run("swap", TWOBIT, "--monoid", "FULL", "--a", "A", "--b", "B", "--u", "mrg")
    assert code == 2
    assert "u has no inverse in the monoid; pass --u-inv" in text


def test_copies_reports():
    assert run("copies", TWOBIT, "--lumping", "L1", "--spec", "0001", "--swap", "nop", "--swap", "exch") == (
        0,
        "copies: {00}\n---\nverdict: ok\ncopies: 2\nresult: {00}\n",
    )
    code, text = run("copies", TWOBIT, "--lumping", "L1", "--spec", "0001")
    assert code == 0
    assert "copies: {00 01 10 11}\n" in text
    code, text = run("copies", TWOBIT, "--lumping", "L1", "--spec", "0001", "--swap", "nop", "--swap", "set1o")
    assert code == 1
    assert "copies: impossible (copies 0 and 1 clash)" in text


def test_approx_reports():
    code, text = run("approx-verify", TWOBIT, "--approx", "HAM", "--triangle")
    assert (code, text) == (
        0,
        "invariants: ok\n"
        "attainable: yes\n"
        "triangle: ok (9 pairs)\n"
        "---\n"
        "verdict: ok\n"
        "attainable: yes\n"
        "failures: 0\n"
        "triangle: ok\n",
    )
    code, text = run("approx-robust", TWOBIT, "--approx", "HAM", "--monoid", "PERM", "--spec", "00", "--eps", "1")
    assert code == 0
    assert "blurred: {00 01 10}\n" in text
    assert "stable theory: no\n" in text
    assert "robust: yes\n" in text
    code, text = run("approx-robust", TWOBIT, "--approx", "HAM", "--monoid", "FULL", "--spec", "00", "--eps", "1")
    assert code == 1
    assert "robust: no\n" in text


def test_approx_reduce_report():
    code, text = run("approx-reduce", TWOBIT, "--approx", "HAM", "--lumping", "L1")
    assert (code, text) == (
        0,
        "small space: 0001 1011\n"
        "eps 0: 0001->0001 1011->1011\n"
        "eps 1: 0001->{0001 1011} 1011->{0001 1011}\n"
        "eps 2: 0001->{0001 1011} 1011->{0001 1011}\n"
        "collapsed: 1 2\n"
        "invariants: ok\n"
        "---\n"
        "verdict: ok\n"
        "collapsed: 1\n",
    )


def test_convex_reports():
    assert run("hull", TWOBIT, "--points", "SEG", "--point", "1/3", "--oracle") == (
        0,
        "contains: yes\n---\nverdict: contains\noracle: agree\n",
    )
    code, text = run("hull", TWOBIT, "--points", "SEG", "--point", "2")
    assert (code, text) == (1, "contains: no\n---\nverdict: outside\n")
    code, text = run("extreme", TWOBIT, "--points", "SQ", "--oracle")
    assert code == 0
    assert text.startswith("0 0\n0 1\n1 0\n1 1\n---\n")
    assert "extreme: 4" in text and "of: 5" in text
    assert run("prob-equiv", TWOBIT, "--points", "SEG", "--points-b", "ENDS")[1] == (
        "equivalent: yes\n---\nverdict: equivalent\n"
    )


def test_laws_report():
    code, text = run("laws", "--seed", "1", "--trials", "25")
    assert code == 0
    assert "nested-equals-direct: ok (25 trials)\n" in text
    assert text.count("ok (25 trials)") == 7
    assert "laws: 7" in text
    assert "trials: 25" in text


def test_check_report():
    code, text = run("check", ANIMALS)
    assert code == 0
    assert "states: cheetah leopard jaguar puma lynx\n" in text
    assert "monoid WATCH: gen = confuse\n" in text
    assert "verdict: ok" in text
    assert "maps: 2" in text


# -- environment cap


def test_env_cap_applies_to_uncapped_monoids(monkeypatch):
    monkeypatch.setenv("RTK_CAP", "10")
    code, text = run("free", TWOBIT, "--monoid", "PERM", "--spec", "00")
    assert code == 3
    assert "verdict: cap-exceeded" in text
    assert "error: CapExceeded" in text
    assert "count: 11" in text
    # a cap line in the file wins over the environment
    assert run("reach", TWOBIT, "--monoid", "FULL", "--from", "00", "--to", "00")[0] == 0


def test_env_cap_validation(monkeypatch):
    monkeypatch.setenv("RTK_CAP", "abc")
    code, text = run("free", TWOBIT, "--monoid", "PERM", "--spec", "00")
    assert code == 2
    assert "RTK_CAP must be a positive integer, got 'abc'" in text


# -- parse failures carry line and column


def check_file(tmp_path, body, name="bad.rt"):
    f = tmp_path / name
    f.write_text(body)
    return run("check", str(f))


def test_parse_unknown_state(tmp_path):
    code, text = check_file(tmp_path, "[states] a b\n\n[map f]\na -> c\nb -> b\n")
    assert code == 2
    assert "error: 4:1: unknown state 'c'" in text
    assert "error: ParseError" in text


def test_parse_bad_coordinate_column(tmp_path):
    code, text = check_file(tmp_path, "[points P]\n1/2 x\n")
    assert code == 2
    assert "error: 2:5: bad coordinate 'x'" in text


def test_parse_outside_section(tmp_path):
    code, text = check_file(tmp_path, "a -> b\n")
    assert code == 2
    assert "error: 1:1: content outside any section" in text


def test_parse_unterminated_header(tmp_path):
    code, text = check_file(tmp_path, "[states a\n")
    assert code == 2
    assert "error: 1:1: unterminated section header" in text


def test_parse_duplicate_name(tmp_path):
    code, text = check_file(tmp_path, "[states] a\n[map f]\na -> a\n[map f]\na -> a\n")
    assert code == 2
    assert "section name 'f' is already taken" in text


def test_parse_not_lumping(tmp_path):
    code, text = check_file(tmp_path, "[states] a b\n[lumping L]\na -> b\nb -> b\n")
    assert code == 2
    assert "error: 2:1: not a lumping: not inflating at a" in text


def test_parse_missing_eps(tmp_path):
    code, text = check_file(tmp_path, "[states] a\n[map m]\na -> a\n[approx X]\nindex e\nmax e\n")
    assert code == 2
    assert "error: 4:1: no eps line for label 'e'" in text


def test_parse_unknown_generator(tmp_path):
    code, text = check_file(tmp_path, "[states] a\n[monoid M]\ngen = nosuch\n")
    assert code == 2
    assert "no map named 'nosuch'" in text


def test_not_utf8(tmp_path):
    f = tmp_path / "bin.rt"
    f.write_bytes(b"[states] \xff\n")
    code, text = run("check", str(f))
    assert code == 2
    assert "is not UTF-8" in text


# -- canonical formatting and DOT export


def test_format_model_round_trip():
    text = Path(TWOBIT).read_text()
    m = parse_theory(text)
    canon = format_model(m)
    m2 = parse_theory(canon)
    assert m2 == m
    assert format_model(m2) == canon
    assert canon.startswith("[states] 00 01 10 11\n")
    assert "[lumping L1]" in canon
    assert "chain 0 1 2 : 0+0=0 0+1=1 0+2=2 1+1=2 1+2=2 2+2=2" in canon


def test_export_dot_single_node():
    assert export_dot(["a"], {(0, 0)}) == 'digraph rtk {\n  rankdir=BT;\n  "a";\n}\n'


def test_export_dot_reduces_transitively():
    names = ["a", "b", "c", "d"]
    leq = {(i, i) for i in range(4)} | {(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)}
    dot = export_dot(names, leq)
    assert '"a" -> "b";' in dot
    assert '"b" -> "d";' in dot
    assert '"a" -> "d";' not in dot
    chain = export_dot(["x", "y", "z"], {(0, 1), (1, 2), (0, 2)})
    assert '"x" -> "z";' not in chain


def test_dot_file_output(tmp_path):
    target = tmp_path / "out.dot"
    code, text = run("subsystems", TWOBIT, "--monoid", "A", "--dot", str(target))
    assert code == 0
    assert f"dot written: {target}" in text
    body = target.read_text()
    assert body.startswith("digraph rtk {")
    assert '"S0" -> "S1";' in body


# -- entry point plumbing


def test_main_writes_report(capsys):
    assert main(["check", ANIMALS]) == 0
    out = capsys.readouterr().out
    assert "states: cheetah leopard jaguar puma lynx" in out


def test_help_and_usage():
    assert run("--help") == (0, "")
    code, text = run()
    assert code == 2
    assert "verdict: usage" in text
