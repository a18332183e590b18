"""Text round trips: what the formatters emit, the parsers read back exactly."""

import random

import pytest

from hornlab import (
    Cst,
    Eq,
    Exists,
    Forall,
    Not,
    ParseError,
    Rel,
    Var,
    VocabularySpec,
    datalog_r_to_slfp,
    format_dimacs,
    format_formula,
    format_program,
    format_structure,
    format_vocab,
    parse_dimacs,
    parse_formula,
    parse_program,
    parse_structure,
    parse_vocab,
)
from hornlab.gen import (
    COLORED,
    EDGE,
    POINTED,
    random_datalog_query,
    random_fo,
    random_horn_sentence,
    random_lfp_normal,
    random_prenex_fo,
    random_structure,
)
from hornlab.lab import corpus_item
from hornlab.textio import parse_artifact

from conftest import seeds


STRUCTURE_TEXT = """\
# a three element path with endpoints pinned
vocab { rel E/2; const s; const t; }
domain 3
E = { (0,1) (1,2) }
s = 0
t = 2
"""

PROGRAM_TEXT = """\
rel E/2.
const s, t.
goal Q.
R(x,y) :- E(x,y).
R(x,y) :- E(x,z), R(z,y).
Q :- R(s,t).
"""


def test_structure_file_reads_and_reprints():
    struct = parse_structure(STRUCTURE_TEXT)
    assert struct.size == 3
    assert struct.relation("E") == frozenset({(0, 1), (1, 2)})
    assert struct.constants == {"s": 0, "t": 2}
    again = parse_structure(format_structure(struct))
    assert again == struct


def test_program_file_matches_the_corpus_query():
    query = parse_program(PROGRAM_TEXT)
    assert query == corpus_item("st_path").payload


def test_vocab_round_trip():
    vocab = VocabularySpec((("E", 2), ("U", 1)), ("s",))
    assert parse_vocab(format_vocab(vocab)) == vocab


def test_zeroary_relation_prints_as_truth_value():
    vocab = VocabularySpec((("Q", 0),), ())
    from hornlab import FiniteStructure
    struct = FiniteStructure(vocab, 2, {"Q": frozenset({()})})
    text = format_structure(struct)
    assert "Q = true" in text
    assert parse_structure(text) == struct


def test_constant_directive_separates_constants_from_variables():
    phi = parse_formula("const s. E(s, x)")
    assert phi == Rel("E", (Cst("s"), Var("x")))
    bare = parse_formula("E(s, x)")
    assert bare == Rel("E", (Var("s"), Var("x")))


def test_formula_spellings():
    assert parse_formula("x != y") == Not(Eq(Var("x"), Var("y")))
    assert parse_formula("forall x, y E(x,y)") == Forall("x", Forall("y", Rel(
        "E", (Var("x"), Var("y")))))
    assert parse_formula("exists x' E(x', x')") == Exists("x'", Rel(
        "E", (Var("x'"), Var("x'"))))


@pytest.mark.parametrize("seed", seeds("fmt-fo"))
def test_first_order_round_trip(seed):
    rng = random.Random(seed)
    phi = random_fo(rng, COLORED, ("x", "y"), depth=3)
    assert parse_formula(format_formula(phi)) == phi


@pytest.mark.parametrize("seed", seeds("fmt-prenex"))
def test_prenex_and_fixed_point_round_trips(seed):
    rng = random.Random(seed)
    for phi in (random_prenex_fo(rng, POINTED, n_free=1),
                random_lfp_normal(rng)):
        assert parse_formula(format_formula(phi)) == phi


@pytest.mark.parametrize("seed", seeds("fmt-so"))
def test_second_order_round_trip(seed):
    rng = random.Random(seed)
    sof = random_horn_sentence(rng, allow_univ=True)
    flat = sof.to_formula()
    assert parse_formula(format_formula(sof)) == flat


def test_simultaneous_fixed_point_round_trip():
    phi, _ = datalog_r_to_slfp(corpus_item("reach").payload)
    assert parse_formula(format_formula(phi)) == phi
    sentence, _ = datalog_r_to_slfp(corpus_item("st_path").payload)
    assert parse_formula(format_formula(sentence)) == sentence


@pytest.mark.parametrize("variant", ["plain", "star", "r", "star-r"])
def test_program_round_trip_every_variant(variant):
    for seed in seeds(f"fmt-prog-{variant}", 4):
        rng = random.Random(seed)
        query = random_datalog_query(rng, variant=variant)
        assert parse_program(format_program(query)) == query


def test_stratified_program_round_trip():
    query = corpus_item("no_path").payload
    text = format_program(query)
    assert "stratum." in text
    assert parse_program(text) == query


@pytest.mark.parametrize("vocab", [EDGE, COLORED, POINTED])
def test_structure_round_trip(vocab):
    for seed in seeds("fmt-struct", 4):
        rng = random.Random(seed)
        struct = random_structure(rng, vocab, rng.randint(1, 4))
        assert parse_structure(format_structure(struct)) == struct


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError) as err:
        parse_formula("forall x (E(x, x) & ")
    assert "line 1" in str(err.value)
    with pytest.raises(ParseError) as err:
        parse_structure("vocab { rel E/2; }\ndomain 3\nE = { (0,1) (1 2) }\n")
    assert "line 3" in str(err.value)


def test_programs_need_a_goal():
    with pytest.raises(ParseError, match="goal"):
        parse_program("rel E/2.\nR(x,y) :- E(x,y).\n")


def test_dimacs_round_trip_and_header_check():
    clauses = ((1, 3), (2, -3), (1, 2))
    text = format_dimacs(clauses)
    assert parse_dimacs(text) == clauses
    assert parse_dimacs("c comment\np cnf 2 2\n1 -2 0\n2 0\n") == ((1, -2), (2,))
    with pytest.raises(ParseError, match="clause"):
        parse_dimacs("p cnf 2 3\n1 0\n2 0\n")


def test_artifact_sniffing():
    assert parse_artifact(PROGRAM_TEXT) == corpus_item("st_path").payload
    assert parse_artifact("const s. E(s, s)") == Rel("E", (Cst("s"), Cst("s")))
