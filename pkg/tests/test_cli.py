"""Drive every subcommand through run_command and pin the exit-code contract."""

import pytest

from hornlab import parse_formula, parse_program, parse_structure
from hornlab.cli import main, run_command
from hornlab.lab import corpus_item

PATH3 = """\
vocab { rel E/2; const s; const t; }
domain 3
E = { (0,1) (1,2) }
s = 0
t = 2
"""

ST_PROGRAM = """\
rel E/2.
const s, t.
goal Q.
R(x,y) :- E(x,y).
R(x,y) :- E(x,z), R(z,y).
Q :- R(s,t).
"""

EDGE_VOCAB_TEXT = "vocab { rel E/2; }\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return write


def test_parse_fo(files):
    f = files("f.hl", "exists y E(x, y)")
    out = run_command(["parse", "--kind", "fo", f])
    assert out.exit_code == 0
    assert "free: x" in out.report


def test_parse_so_reports_fragments(files):
    f = files("f.hl", "exists2 S/1 forall x (U(x) -> S(x))")
    out = run_command(["parse", "--kind", "so", f])
    assert out.exit_code == 0
    assert "fragments:" in out.report
    assert "so-horn" in out.report


def test_parse_kind_mismatch(files):
    f = files("f.hl", "exists2 S/1 S(x)")
    out = run_command(["parse", "--kind", "fo", f])
    assert out.exit_code == 2
    assert "so" in out.report


def test_parse_reports_position_on_bad_syntax(files):
    f = files("f.hl", "forall x (E(x, x) & ")
    out = run_command(["parse", "--kind", "fo", f])
    assert out.exit_code == 2
    assert "line 1" in out.report


def test_parse_missing_file():
    out = run_command(["parse", "--kind", "fo", "/nonexistent/f.hl"])
    assert out.exit_code == 2


def test_parse_datalog_reports_strata(files):
    f = files("p.hl", ST_PROGRAM)
    out = run_command(["parse", "--kind", "datalog", f])
    assert out.exit_code == 0
    assert "variant plain" in out.report
    assert "goal: Q" in out.report


def test_eval_exits_zero_for_both_truth_values(files):
    s = files("a.hl", PATH3)
    t = files("t.hl", "const s, t. E(s, t)")
    f = files("f.hl", "const s, t. exists z (E(s, z) & E(z, t))")
    false_out = run_command(["eval", "--formula", t, "--structure", s])
    true_out = run_command(["eval", "--formula", f, "--structure", s])
    assert false_out.exit_code == 0 and "value: false" in false_out.report
    assert true_out.exit_code == 0 and "value: true" in true_out.report


def test_eval_with_assignment(files):
    s = files("a.hl", PATH3)
    f = files("f.hl", "E(x, y)")
    out = run_command(["eval", "--formula", f, "--structure", s,
                       "--assign", "x=0,y=1"])
    assert out.exit_code == 0
    assert "value: true" in out.report


def test_eval_budget_flag_trips(files):
    s = files("a.hl", PATH3)
    f = files("f.hl", "const s, t. exists2 S/2 (S(s,t) & false)")
    out = run_command(["eval", "--formula", f, "--structure", s,
                       "--budget", "3"])
    assert out.exit_code == 3


def test_eval_budget_env_and_override(files, monkeypatch):
    s = files("a.hl", PATH3)
    f = files("f.hl", "const s, t. exists2 S/2 (S(s,t) & false)")
    monkeypatch.setenv("HORNLAB_BUDGET", "3")
    assert run_command(["eval", "--formula", f, "--structure", s]).exit_code == 3
    over = run_command(["eval", "--formula", f, "--structure", s,
                        "--budget", "100000"])
    assert over.exit_code == 0
    monkeypatch.setenv("HORNLAB_BUDGET", "lots")
    assert run_command(["eval", "--formula", f, "--structure", s]).exit_code == 2


def test_run_datalog_prints_every_derived_relation(files):
    p = files("p.hl", ST_PROGRAM)
    s = files("a.hl", PATH3)
    out = run_command(["run-datalog", "--program", p, "--structure", s])
    assert out.exit_code == 0
    assert "Q = true" in out.report
    assert "R = { (0,1) (0,2) (1,2) }" in out.report


def test_run_datalog_stage_trace(files):
    p = files("p.hl", ST_PROGRAM)
    s = files("a.hl", PATH3)
    out = run_command(["run-datalog", "--program", p, "--structure", s,
                       "--trace-stages"])
    assert out.exit_code == 0
    assert "stage 1: R = { (0,1) (1,2) }" in out.report
    assert "stage 2: R = { (0,1) (0,2) (1,2) }" in out.report


def test_run_datalog_engines_agree(files):
    p = files("p.hl", ST_PROGRAM)
    s = files("a.hl", PATH3)
    naive = run_command(["run-datalog", "--program", p, "--structure", s])
    semi = run_command(["run-datalog", "--program", p, "--structure", s,
                        "--engine", "seminaive"])
    assert naive.report == semi.report


def test_translate_program_to_sentence(files, tmp_path):
    p = files("p.hl", ST_PROGRAM)
    dest = str(tmp_path / "out.hl")
    out = run_command(["translate", "--rule", "dl2horn", "--in", p,
                       "--out", dest])
    assert out.exit_code == 0
    assert "rule: dl2horn" in out.report
    assert "contract: complement" in out.report
    reread = parse_formula(open(dest, encoding="utf-8").read())
    assert reread is not None


def _pair(out, key):
    for line in out.machine_report.split("\n"):
        if line.startswith(key + "="):
            return line[len(key) + 1:].replace("\\n", "\n").replace("\\\\", "\\")
    raise KeyError(key)


def test_translate_inline_output_reparses(files):
    p = files("p.hl", ST_PROGRAM)
    out = run_command(["translate", "--rule", "dlr2lfp", "--in", p])
    assert out.exit_code == 0
    assert parse_formula(_pair(out, "output")) is not None


def test_translate_type_mismatch(files):
    p = files("p.hl", ST_PROGRAM)
    out = run_command(["translate", "--rule", "fo2dlr", "--in", p])
    assert out.exit_code == 2
    assert "expects a formula" in out.report


def test_translate_rejects_out_of_fragment_input(files):
    f = files("f.hl", "forall2 S/1 forall x, y (S(x) | S(y))")
    out = run_command(["translate", "--rule", "prop1", "--in", f])
    assert out.exit_code == 2


def test_equiv_exhaustive_equivalent(files):
    a = files("a.hl", "exists y E(x, y)")
    b = files("b.hl", "!(forall y !E(x, y))")
    v = files("v.hl", EDGE_VOCAB_TEXT)
    out = run_command(["equiv", "--a", a, "--b", b, "--vocab", v,
                       "--max-size", "3"])
    assert out.exit_code == 0
    assert "checked: 530" in out.report
    assert "status=ok" in out.machine_report


def test_equiv_counterexample_exits_one(files):
    a = files("a.hl", "exists y E(x, y)")
    b = files("b.hl", "forall y E(x, y)")
    v = files("v.hl", EDGE_VOCAB_TEXT)
    out = run_command(["equiv", "--a", a, "--b", b, "--vocab", v,
                       "--max-size", "2"])
    assert out.exit_code == 1
    assert "E = { (0,0) }" in out.report
    assert "status=violation" in out.machine_report


def test_equiv_sample_mode(files):
    a = files("a.hl", "exists y E(x, y)")
    v = files("v.hl", EDGE_VOCAB_TEXT)
    out = run_command(["equiv", "--a", a, "--b", a, "--vocab", v,
                       "--max-size", "4", "--samples", "10", "--seed", "7"])
    assert out.exit_code == 0
    assert "mode=sample" in out.machine_report


def test_closure_substructure_ok(files):
    f = files("f.hl", corpus_emit("no_st_path"))
    out = run_command(["closure", "--in", f, "--direction", "sub",
                       "--trials", "40"])
    assert out.exit_code == 0


def test_closure_extension_counterexample(files):
    f = files("p.hl", corpus_emit("reach_all_sym"))
    out = run_command(["closure", "--in", f, "--direction", "ext"])
    assert out.exit_code == 1
    assert "status=violation" in out.machine_report


def corpus_emit(name):
    out = run_command(["corpus", "--emit", name])
    assert out.exit_code == 0
    return out.report + "\n"


def test_corpus_list_names_everything():
    out = run_command(["corpus", "--list"])
    assert out.exit_code == 0
    for name in ("st_path", "reach", "slow_copy", "cnf_unsat"):
        assert name in out.report


def test_corpus_emit_round_trips():
    assert parse_program(corpus_emit("st_path")) == corpus_item("st_path").payload
    assert parse_formula(corpus_emit("no_st_path")) is not None


def test_corpus_emit_unknown_name():
    assert run_command(["corpus", "--emit", "nothing_here"]).exit_code == 2


def test_cnf_encode_writes_the_clause_structure(files, tmp_path):
    d = files("f.cnf", "p cnf 3 3\n1 3 0\n2 -3 0\n1 2 0\n")
    dest = str(tmp_path / "enc.hl")
    out = run_command(["cnf-encode", "--dimacs", d, "--out", dest])
    assert out.exit_code == 0
    struct = parse_structure(open(dest, encoding="utf-8").read())
    assert struct.size == 3
    assert struct.relation("N") == frozenset({(1, 2)})


def test_machine_report_shape(files):
    f = files("f.hl", "E(x, y)")
    out = run_command(["parse", "--kind", "fo", f])
    lines = out.machine_report.split("\n")
    assert lines[0] == "hornlab-report 1"
    assert lines[1] == "command=parse"
    assert lines[2] == "status=ok"


def test_usage_errors(files):
    assert run_command(["nope"]).exit_code == 2
    assert run_command(["parse", "--kind", "mystery", "x"]).exit_code == 2
    assert run_command(["translate", "--rule", "lemma1"]).exit_code == 2


def test_main_prints_machine_report(files, capsys):
    f = files("f.hl", "E(x, y)")
    code = main(["--machine", "parse", "--kind", "fo", f])
    printed = capsys.readouterr().out
    assert code == 0
    assert printed.startswith("hornlab-report 1\n")
