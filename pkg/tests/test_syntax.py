"""Tree constructors, helpers, and the validation baked into them."""

import pytest

from hornlab.syntax import (
    And, Bottom, Cst, Eq, Exists, Forall, Implies, Not, Or, ParseError, Rel,
    ShapeError, Top, UnivAtom, Var, conj, constants_of, disj, exists_block,
    forall_block, free_vars, neg, term_vars,
)

x, y, z = Var("x"), Var("y"), Var("z")


def test_conj_flattens_to_top_and_singleton():
    assert conj(()) == Top()
    assert conj((Rel("E", (x, y)),)) == Rel("E", (x, y))
    assert isinstance(conj((Rel("U", (x,)), Rel("U", (y,)))), And)


def test_disj_empty_is_bottom():
    assert disj(()) == Bottom()


def test_neg_collapses_double_negation():
    a = Rel("U", (x,))
    assert neg(neg(a)) == a
    assert neg(a) == Not(a)


def test_forall_block_orders_outermost_first():
    f = forall_block(("x", "y"), Rel("E", (x, y)))
    assert f == Forall("x", Forall("y", Rel("E", (x, y))))
    assert exists_block((), Top()) == Top()


def test_free_vars_respects_binding():
    phi = Forall("x", Implies(Rel("E", (x, y)), Exists("y", Rel("E", (y, x)))))
    assert free_vars(phi) == {"y"}


def test_free_vars_of_univ_atom_excludes_bound_positions():
    # universal atom variables are local to the atom
    cl = UnivAtom(("u",), "R", (Var("u"), x))
    assert term_vars(cl.args) - set(cl.uvars) == {"x"}


def test_constants_of_walks_everything():
    phi = And((Rel("E", (Cst("s"), x)), Eq(Cst("t"), y)))
    assert constants_of(phi) == {"s", "t"}


def test_univ_atom_requires_leading_bound_positions():
    UnivAtom(("u", "v"), "R", (Var("u"), Var("v"), x))
    with pytest.raises(ShapeError):
        UnivAtom(("u",), "R", (x, Var("u")))


def test_univ_atom_rejects_duplicate_bound_variables():
    with pytest.raises(ShapeError):
        UnivAtom(("u", "u"), "R", (Var("u"), Var("u")))


def test_univ_atom_rejects_reuse_in_trailing_positions():
    with pytest.raises(ShapeError):
        UnivAtom(("u",), "R", (Var("u"), Var("u")))


def test_nodes_are_frozen_and_hashable():
    a = Rel("E", (x, y))
    assert a == Rel("E", (x, y))
    assert hash(a) == hash(Rel("E", (x, y)))
    with pytest.raises(AttributeError):
        a.sym = "F"
    assert len({Or((a, a)), Or((a, a))}) == 1


def test_parse_error_carries_position():
    e = ParseError("boom", line=3, col=7)
    assert "line 3" in str(e) and "col 7" in str(e)
    assert (e.line, e.col) == (3, 7)
