"""Structures, first-order evaluation, normal forms, enumeration."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EDGE, brute_sat, fo_sentences, oracle_fo, qf_formulas, structures
from hornlab import gen
from hornlab.core import (
    CNF_VOCAB, FiniteStructure, VocabularySpec, cnf_satisfiable, cnf_to_structure,
    count_structures, enumerate_structures, eval_fo, eval_term, extend_structure,
    fold_constants, induced_substructure, to_cnf_matrix, to_nnf, to_prenex_dnf,
)
from hornlab.syntax import (
    And, Cst, Eq, Exists, Forall, Implies, Not, Or, Rel, Top, UnboundVariable,
    ValidationError, Var, free_vars,
)

x, y = Var("x"), Var("y")


def test_structure_validates_tuples_against_domain():
    with pytest.raises(ValidationError):
        FiniteStructure(EDGE, 2, {"E": frozenset({(0, 5)})})
    from hornlab.syntax import ArityMismatch
    with pytest.raises(ArityMismatch):
        FiniteStructure(EDGE, 2, {"E": frozenset({(0,)})})


def test_structure_fills_missing_relations_empty():
    s = FiniteStructure(EDGE, 2)
    assert s.relation("E") == frozenset()
    with pytest.raises(ValidationError):
        s.relation("F")


def test_eval_term_reports_missing_bindings():
    s = FiniteStructure(EDGE, 2)
    with pytest.raises(UnboundVariable):
        eval_term(Var("q"), s, {})
    with pytest.raises(UnboundVariable):
        eval_term(Cst("c"), s, {})


@given(structures(max_size=3), fo_sentences())
@settings(max_examples=150, deadline=None)
def test_eval_fo_matches_recursive_oracle(struct, phi):
    assert eval_fo(phi, struct) == oracle_fo(phi, struct)


@given(structures(max_size=3), qf_formulas())
@settings(max_examples=100, deadline=None)
def test_nnf_preserves_truth(struct, phi):
    nnf = to_nnf(phi)
    for e1 in range(struct.size):
        for e2 in range(struct.size):
            env = {"x": e1, "y": e2}
            assert eval_fo(phi, struct, dict(env)) == eval_fo(nnf, struct, dict(env))


def test_nnf_pushes_negation_to_atoms():
    phi = Not(And((Rel("E", (x, y)), Not(Rel("E", (y, x))))))
    nnf = to_nnf(phi)
    assert nnf == Or((Not(Rel("E", (x, y))), Rel("E", (y, x))))


@given(structures(max_size=3), fo_sentences(depth=2))
@settings(max_examples=120, deadline=None)
def test_prenex_dnf_preserves_truth(struct, phi):
    pd = to_prenex_dnf(phi)
    assert eval_fo(pd.to_formula(), struct) == eval_fo(phi, struct)


@given(fo_sentences(depth=2))
@settings(max_examples=60, deadline=None)
def test_prenex_dnf_matrix_is_flat(phi):
    pd = to_prenex_dnf(phi)
    seen = set()
    for q, v in pd.prefix:
        assert q in ("forall", "exists")
        assert v not in seen, "prefix repeats a variable"
        seen.add(v)
    from hornlab.core import is_literal
    for conjunct in pd.matrix:
        for lit in conjunct:
            assert is_literal(lit)


@given(structures(max_size=2), qf_formulas(depth=2))
@settings(max_examples=80, deadline=None)
def test_cnf_matrix_preserves_truth(struct, phi):
    clauses = to_cnf_matrix(phi)
    for env in ({"x": a, "y": b} for a in range(struct.size)
                for b in range(struct.size)):
        direct = eval_fo(phi, struct, dict(env))
        via = all(any(eval_fo(l, struct, dict(env)) for l in cl) for cl in clauses)
        assert direct == via


def test_fold_constants_shrinks_trivial_connectives():
    assert fold_constants(And((Top(), Rel("E", (x, y))))) == Rel("E", (x, y))
    assert fold_constants(Implies(Rel("E", (x, y)), Top())) == Top()
    assert fold_constants(Eq(x, x)) == Top()


# --- enumeration -------------------------------------------------------------


COUNTS = [
    (EDGE, 1, 2), (EDGE, 2, 16), (EDGE, 3, 512),
    (VocabularySpec((("E", 2),), ("s", "t")), 2, 64),
    (VocabularySpec((("U", 1), ("V", 1)), ()), 3, 64),
    (VocabularySpec((("Q", 0),), ()), 2, 2),
]


@pytest.mark.parametrize("vocab,n,expected", COUNTS)
def test_count_matches_exhaustive_enumeration(vocab, n, expected):
    structs = list(enumerate_structures(vocab, n))
    assert count_structures(vocab, n) == expected
    assert len(structs) == expected
    assert len(set(structs)) == expected


def test_enumeration_order_is_deterministic():
    a = [s.relation("E") for s in enumerate_structures(EDGE, 2)]
    b = [s.relation("E") for s in enumerate_structures(EDGE, 2)]
    assert a == b


def test_sampled_enumeration_replays_with_seed():
    a = list(enumerate_structures(EDGE, 3, sample=10, seed=42))
    b = list(enumerate_structures(EDGE, 3, sample=10, seed=42))
    c = list(enumerate_structures(EDGE, 3, sample=10, seed=43))
    assert a == b
    assert a != c


def test_induced_substructure_remaps_and_pins_constants():
    v = VocabularySpec((("E", 2),), ("s",))
    base = FiniteStructure(v, 3, {"E": frozenset({(0, 2), (1, 2)})}, {"s": 2})
    sub, remap = induced_substructure(base, [0, 2])
    assert sub.size == 2
    assert remap == {0: 0, 2: 1}
    assert sub.relation("E") == {(0, 1)}
    assert sub.constants["s"] == 1
    with pytest.raises(ValidationError):
        induced_substructure(base, [0, 1])  # drops the constant


def test_extension_keeps_old_tuples():
    rng = random.Random(5)
    for i in range(30):
        base = gen.random_structure(rng, gen.EDGE, rng.randint(1, 3))
        ext = extend_structure(base, 2, seed=i)
        assert ext.size == base.size + 2
        assert base.relation("E") <= ext.relation("E")
        back, _ = induced_substructure(ext, range(base.size))
        assert back.relation("E") == base.relation("E")


# --- propositional bridge ------------------------------------------------------


def test_cnf_structure_of_known_formula():
    # (p1 or p3) and (p2 or not p3) and (p1 or p2)
    clauses = ((1, 3), (2, -3), (1, 2))
    a = cnf_to_structure(clauses)
    assert a.vocab == CNF_VOCAB
    assert a.size == 3
    assert a.relation("Cla") == {(0,), (1,), (2,)}
    assert a.relation("Var") == {(0,), (1,), (2,)}
    assert a.relation("P") == {(0, 0), (0, 2), (1, 1), (2, 0), (2, 1)}
    assert a.relation("N") == {(1, 2)}


def test_cnf_structure_domain_covers_clauses_and_variables():
    a = cnf_to_structure(((1,), (-1,), (1,)))
    assert a.size == 3
    assert a.relation("Cla") == {(0,), (1,), (2,)}
    assert a.relation("Var") == {(0,)}


@given(st.lists(st.lists(st.integers(1, 4).flatmap(
    lambda v: st.sampled_from((v, -v))), min_size=1, max_size=4),
    min_size=0, max_size=5))
@settings(max_examples=120, deadline=None)
def test_cnf_satisfiable_matches_truth_table(clauses):
    cls = tuple(tuple(c) for c in clauses)
    assert cnf_satisfiable(cls) == brute_sat(cls)
