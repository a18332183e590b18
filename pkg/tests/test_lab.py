"""Equivalence sweeps, duality and closure checks, and the built-in corpus."""

import pytest

from hornlab import (
    Cst,
    DatalogQuery,
    Exists,
    Forall,
    Not,
    Rel,
    StratifiedQuery,
    ValidationError,
    Var,
    check_closure,
    check_duality,
    check_equiv,
    cnf_satisfiable,
    cnf_to_structure,
    corpus,
    corpus_item,
    eval_so_bruteforce,
    make_ordered_structure,
    validate_program,
)
from hornlab.gen import EDGE

SOME_EDGE = Exists("y", Rel("E", (Var("x"), Var("y"))))
EVERY_EDGE = Forall("y", Rel("E", (Var("x"), Var("y"))))


def test_equiv_self_checks_every_structure():
    verdict = check_equiv(SOME_EDGE, SOME_EDGE, EDGE, max_n=3)
    assert verdict.ok
    assert verdict.checked == 530
    assert verdict.by_size == ((1, 2), (2, 16), (3, 512))
    assert verdict.skipped == 0


def test_smallest_counterexample_surfaces_first():
    verdict = check_equiv(SOME_EDGE, EVERY_EDGE, EDGE, max_n=3)
    assert not verdict.ok
    w = verdict.witness
    assert w.structure.size == 2
    assert w.structure.relation("E") == frozenset({(0, 0)})
    assert w.point == (0,)
    assert (w.left, w.right) == (True, False)


def test_duality_of_the_path_pair():
    sentence = corpus_item("no_st_path")
    query = corpus_item("st_path")
    verdict = check_duality(sentence.payload, query.payload, sentence.vocab, max_n=2)
    assert verdict.ok, verdict.witness


def test_duality_sample_mode_with_seed():
    sentence = corpus_item("no_st_path")
    query = corpus_item("st_path")
    verdict = check_duality(sentence.payload, query.payload, sentence.vocab,
                            max_n=3, mode="sample", samples=10, seed=3)
    assert verdict.ok, verdict.witness
    assert verdict.checked > 0


def test_broken_duality_pair_is_caught():
    # "no direct edge from s to t" is weaker than "no path", so a two-step
    # cycle satisfies it together with the path query
    phi = Not(Rel("E", (Cst("s"), Cst("t"))))
    item = corpus_item("st_path")
    verdict = check_duality(phi, item.payload, item.vocab, max_n=2)
    assert not verdict.ok
    w = verdict.witness
    assert w.left == w.right
    assert w.structure.size == 2


def test_path_blocking_survives_substructures():
    item = corpus_item("no_st_path")
    verdict = check_closure(item.payload, "substructure", vocab=item.vocab,
                            trials=60, seed=0)
    assert verdict.ok, verdict.witness
    assert verdict.checked == 60


def test_reachability_survives_extensions():
    item = corpus_item("reach")
    verdict = check_closure(item.payload, "extension", vocab=item.vocab,
                            trials=100, seed=0)
    assert verdict.ok, verdict.witness


def test_fragile_query_fails_extension_closure():
    # reaching every vertex can be destroyed by adding an unreachable one
    item = corpus_item("reach_all_sym")
    verdict = check_closure(item.payload, "extension", vocab=item.vocab,
                            trials=200, seed=0)
    assert not verdict.ok
    assert verdict.witness is not None


def test_closure_rejects_unknown_direction():
    with pytest.raises(ValidationError):
        check_closure(SOME_EDGE, "sideways", vocab=EDGE)


def test_sample_mode_replays_bit_for_bit():
    kw = dict(mode="sample", samples=8, seed=5, max_n=3)
    first = check_equiv(SOME_EDGE, EVERY_EDGE, EDGE, **kw)
    second = check_equiv(SOME_EDGE, EVERY_EDGE, EDGE, **kw)
    assert first == second


def test_budget_skips_are_reported_not_swallowed():
    item = corpus_item("u_avoids_v")
    verdict = check_equiv(item.payload, item.payload, item.vocab,
                          max_n=2, budget=2)
    assert verdict.skipped > 0
    # skipped structures drop out of the checked count instead of passing
    assert verdict.checked + verdict.skipped == 8 + 256
    assert verdict.ok


# --- the corpus -------------------------------------------------------------


def test_corpus_names_are_stable():
    assert {i.name for i in corpus()} == {
        "st_path", "reach", "reach_all", "reach_all_sym", "no_path",
        "slow_copy", "no_st_path", "u_avoids_v", "cnf_unsat", "cnf_example",
    }


def test_corpus_kinds():
    kinds = {i.name: i.kind for i in corpus()}
    assert kinds["st_path"] == "datalog"
    assert kinds["no_path"] == "s-datalog"
    assert kinds["no_st_path"] == "so-sentence"
    assert kinds["cnf_example"] == "cnf"


def test_corpus_programs_validate():
    for item in corpus():
        if item.kind == "datalog":
            assert isinstance(item.payload, DatalogQuery)
            validate_program(item.payload.program)
        elif item.kind == "s-datalog":
            assert isinstance(item.payload, StratifiedQuery)
            for stratum in item.payload.program.strata:
                validate_program(stratum)


def test_corpus_tags_name_the_closure_behavior():
    tags = {i.name: i.tags for i in corpus()}
    assert "extension-closed" in tags["st_path"]
    assert "extension-fragile" in tags["reach_all_sym"]
    assert "substructure-closed" in tags["no_st_path"]
    assert "substructure-closed" in tags["u_avoids_v"]


def test_corpus_item_unknown_name():
    with pytest.raises(ValidationError):
        corpus_item("every_other_vertex")


def test_cnf_example_against_the_unsat_sentence():
    clauses = corpus_item("cnf_example").payload
    sentence = corpus_item("cnf_unsat").payload
    assert cnf_satisfiable(clauses)
    assert not eval_so_bruteforce(sentence, cnf_to_structure(clauses))
    contradiction = ((1,), (-1,))
    assert not cnf_satisfiable(contradiction)
    assert eval_so_bruteforce(sentence, cnf_to_structure(contradiction))


def test_ordered_structure_shape():
    struct = make_ordered_structure(3, pset=(1,))
    assert struct.relation("Lt") == frozenset({(0, 1), (0, 2), (1, 2)})
    assert struct.relation("Succ") == frozenset({(0, 1), (1, 2)})
    assert struct.relation("P") == frozenset({(1,)})
    assert struct.constants == {"min": 0, "max": 2}
