"""Relation quantifiers: clausal normal form, fragments, brute-force truth."""

import itertools
import random

import pytest

from conftest import EDGE, oracle_fo, oracle_horn_sentence
from hornlab import gen
from hornlab.core import enumerate_structures, eval_fo
from hornlab.lab import corpus_item
from hornlab.second_order import (
    EXISTS, FORALL, ClausalCore, HornClause, SoFormula, SoQuant, as_so_formula,
    classify_fragment, eval_so_bruteforce, normalize_clauses, strip_so_prefix,
)
from hornlab.syntax import (
    And, Bottom, BudgetExceeded, Cst, Exists, Forall, Implies, Not, Or, Rel,
    ShapeError, SoExists, SoForall, UnivAtom, Var, forall_block,
)

x, y = Var("x"), Var("y")


def _tags(phi):
    return {str(t) for t in classify_fragment(phi)}


def test_strip_so_prefix_orders_outside_in():
    phi = SoForall("X", 1, SoExists("Y", 2, Rel("X", (x,))))
    prefix, body = strip_so_prefix(phi)
    assert [q.q for q in prefix] == [FORALL, EXISTS]
    assert [q.sym for q in prefix] == ["X", "Y"]
    assert body == Rel("X", (x,))


def test_as_so_formula_round_trips_through_to_formula():
    phi = SoExists("S", 1, Forall("x", Implies(Rel("S", (x,)), Rel("E", (x, x)))))
    sof = as_so_formula(phi)
    assert sof.to_formula() == phi


# --- clausal normal form ---------------------------------------------------------


def test_normalize_clauses_splits_horn_shape():
    phi = SoExists("S", 1, Forall("x", And((
        Implies(Rel("U", (x,)), Rel("S", (x,))),
        Implies(And((Rel("S", (x,)), Rel("V", (x,)))), Bottom()),
    ))))
    sof = normalize_clauses(phi)
    core = sof.core()
    assert core.uvars == ("x",)
    heads = [c.head for c in core.clauses]
    assert Rel("S", (x,)) in heads and None in heads


def test_normalize_rejects_non_horn_over_exists():
    # S(x) or S(y) has two positive quantified atoms in one clause
    phi = SoExists("S", 1, Forall("x", Forall("y", Or((Rel("S", (x,)),
                                                       Rel("S", (y,)))))))
    with pytest.raises(ShapeError):
        normalize_clauses(phi, symbols="exists")


@pytest.mark.parametrize("seed", range(12))
def test_normalize_preserves_truth(seed):
    rng = random.Random(700 + seed)
    sof = gen.random_horn_sentence(rng, allow_univ=True)
    phi = sof.to_formula()
    renorm = normalize_clauses(phi)
    for struct in enumerate_structures(EDGE, 2):
        assert (eval_so_bruteforce(renorm, struct)
                == eval_so_bruteforce(phi, struct)), seed


def test_normalize_is_stable_on_clausal_input():
    sof = corpus_item("no_st_path").payload
    assert normalize_clauses(sof) is sof


# --- fragment classification -----------------------------------------------------


def test_universal_atoms_classify_into_the_r_fragments():
    cl = HornClause(alphas=(UnivAtom(("u",), "S", (Var("u"), x)),),
                    head=Rel("S", (x, x)))
    sof = SoFormula((SoQuant(EXISTS, "S", 2),), ClausalCore(("x",), (cl,)))
    t = _tags(sof)
    assert "so-horn-r" in t and "so-horn" not in t


def test_plain_horn_classifies_without_r():
    t = _tags(corpus_item("no_st_path").payload)
    assert "so-horn" in t and "so-horn-r" in t  # plain embeds into r


def test_mixed_prefix_still_counts_as_horn():
    # the Horn condition is about clause shape, not the quantifier kinds
    cl = HornClause(alphas=(Rel("S", (x,)),), head=Rel("T", (x,)))
    sof = SoFormula((SoQuant(FORALL, "S", 1), SoQuant(EXISTS, "T", 1)),
                    ClausalCore(("x",), (cl,)))
    assert "so-horn" in _tags(sof)


def test_compound_side_condition_needs_the_star():
    cond = Exists("z", And((Rel("E", (x, Var("z"))), Rel("E", (Var("z"), x)))))
    cl = HornClause(alphas=(Rel("S", (x,)),), betas=(cond,), head=Rel("S", (x,)))
    sof = SoFormula((SoQuant(EXISTS, "S", 1),), ClausalCore(("x",), (cl,)))
    t = _tags(sof)
    assert "so-horn-star" in t
    assert "so-horn" not in t


def test_cnf_sentence_classifies_ehorn_r_exactly():
    t = _tags(corpus_item("cnf_unsat").payload)
    assert t == {"general-so", "so-ehorn-r"}


def test_sigma11_normal_form_tag():
    phi = SoExists("S", 1, Forall("x", Exists("y", And((Rel("S", (x,)),
                                                        Rel("E", (x, y)))))))
    assert "sigma11-normal" in _tags(phi)
    # degenerate blocks still count
    assert "sigma11-normal" in _tags(SoExists("S", 1, Rel("S", (Cst("c"),))))


def test_pi11_normal_form_tag():
    phi = SoForall("S", 1, Exists("x", Forall("y", Or((Rel("S", (x,)),
                                                       Not(Rel("S", (y,))))))))
    assert "pi11-normal" in _tags(phi)


def test_stratified_tag_has_depth():
    rng = random.Random(3)
    sof = gen.random_stratified_core(rng)
    tags = classify_fragment(sof)
    s = [t for t in tags if t.kind == "so-horn-s"]
    assert s and s[0].depth is not None and s[0].depth >= 2


# --- brute-force evaluation --------------------------------------------------------


def test_so_exists_finds_a_witness_relation():
    # some subset S with: 0 in S and S closed under E, 2 not in S; fails on a path
    phi = SoExists("S", 1, And((
        Rel("S", (Cst("s"),)),
        forall_block(("x", "y"), Implies(And((Rel("S", (x,)), Rel("E", (x, y)))),
                                         Rel("S", (y,)))),
        Not(Rel("S", (Cst("t"),))),
    )))
    from hornlab.core import FiniteStructure, VocabularySpec
    v = VocabularySpec((("E", 2),), ("s", "t"))
    on_path = FiniteStructure(v, 3, {"E": frozenset({(0, 1), (1, 2)})},
                              {"s": 0, "t": 2})
    off_path = FiniteStructure(v, 3, {"E": frozenset({(1, 0), (2, 1)})},
                               {"s": 0, "t": 2})
    assert not eval_so_bruteforce(phi, on_path)
    assert eval_so_bruteforce(phi, off_path)


def test_so_forall_is_complement_of_so_exists():
    body = Forall("x", Implies(Rel("S", (x,)), Rel("E", (x, x))))
    for struct in enumerate_structures(EDGE, 2):
        assert eval_so_bruteforce(SoForall("S", 1, body), struct) == (
            not eval_so_bruteforce(SoExists("S", 1, Not(body)), struct))


@pytest.mark.parametrize("seed", range(10))
def test_horn_truth_matches_least_model_oracle(seed):
    rng = random.Random(900 + seed)
    sof = gen.random_horn_sentence(rng, allow_univ=(seed % 2 == 0))
    for struct in enumerate_structures(EDGE, 2):
        assert eval_so_bruteforce(sof, struct) == oracle_horn_sentence(sof, struct)


def test_budget_counts_candidates_and_raises():
    phi = SoExists("S", 2, Forall("x", Rel("S", (x, x))))
    struct = next(iter(enumerate_structures(EDGE, 3)))
    with pytest.raises(BudgetExceeded):
        eval_so_bruteforce(phi, struct, budget=5)
    # 2^(3*3) candidates in the worst case, well within the default
    eval_so_bruteforce(phi, struct)


def test_rel_env_overlay_shadows_structure():
    phi = Forall("x", Rel("E", (x, x)))
    struct = next(iter(enumerate_structures(EDGE, 2)))  # empty E
    assert not eval_so_bruteforce(phi, struct)
    assert eval_so_bruteforce(phi, struct,
                              rel_env={"E": frozenset({(0, 0), (1, 1)})})
