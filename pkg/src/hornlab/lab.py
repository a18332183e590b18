"""Cross-formalism equivalence checking and the built-in example corpus.

The checkers sweep small structures exhaustively (or by seeded,
size-stratified samples) and compare truth values pointwise.  Anything
evaluable can sit on either side: first-order formulas, fixed-point
formulas, relation-quantified formulas, rule queries, and stratified
queries.  Relation quantifiers are model-checked by subset enumeration
under an explicit budget; a structure whose check would blow the budget
is reported as skipped, never silently dropped.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .core import (
    CNF_VOCAB, FiniteStructure, VocabularySpec, count_structures,
    enumerate_structures, eval_fo, eval_term, extend_structure,
    induced_substructure,
)
from .datalog import (
    Cond, DatalogProgram, DatalogQuery, DatalogRule, StratifiedProgram,
    StratifiedQuery,
)
from .lfp import lfp_fixpoint, require_positive
from .second_order import (
    EXISTS, FORALL, ClausalCore, HornClause, SoFormula, SoQuant,
    eval_so_bruteforce,
)
from .syntax import (
    And, BudgetExceeded, Cst, Eq, Formula, Implies, Not, Or, Rel, SLfp,
    UnivAtom, ValidationError, Var, forall_block, free_vars, is_first_order,
)

Checkable = Union[Formula, SoFormula, DatalogQuery, StratifiedQuery]

EQUIVALENT = "equivalent-up-to-budget"
COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True, slots=True)
class Counterexample:
    """A re-checkable witness: both sides disagree here."""

    structure: FiniteStructure
    point: tuple[int, ...]
    left: bool
    right: bool


@dataclass(frozen=True, slots=True)
class EquivVerdict:
    status: str
    checked: int
    by_size: tuple[tuple[int, int], ...]
    skipped: int = 0
    witness: Counterexample | None = None

    @property
    def ok(self) -> bool:
        return self.status == EQUIVALENT

    def __str__(self) -> str:
        sizes = ", ".join(f"n={n}: {c}" for n, c in self.by_size)
        head = f"{self.status} ({self.checked} structures; {sizes}"
        head += f"; {self.skipped} skipped over budget)" if self.skipped else ")"
        if self.witness is None:
            return head
        w = self.witness
        return (f"{head}\n  at size {w.structure.size}, point {w.point}: "
                f"left={w.left} right={w.right}")


PointFn = Callable[[tuple[int, ...]], bool]


def _query_arity(q: Union[DatalogQuery, StratifiedQuery]) -> int:
    if isinstance(q, DatalogQuery):
        progs: tuple[DatalogProgram, ...] = (q.program,)
    else:
        progs = q.program.strata
    for p in progs:
        intent = p.intentional()
        if q.goal in intent:
            return intent[q.goal]
    raise ValidationError(f"goal {q.goal} heads no rule")


def _formula_of(obj: Union[Formula, SoFormula]) -> Formula:
    return obj.to_formula() if isinstance(obj, SoFormula) else obj


def _prepare(obj: Checkable, point_vars: tuple[str, ...], budget: int,
             ) -> Callable[[FiniteStructure], PointFn]:
    """Bind one side to a per-structure evaluator.

    Rule queries run their fixpoint once per structure.  A bare
    simultaneous-fixpoint formula whose arguments cover the point
    variables also gets the run-once treatment; everything else is
    evaluated point by point.
    """
    if isinstance(obj, (DatalogQuery, StratifiedQuery)):
        def prep_query(struct: FiniteStructure) -> PointFn:
            rel = obj.run(struct)
            return lambda pt: pt in rel
        return prep_query

    f = _formula_of(obj)
    if isinstance(f, SLfp) and free_vars(f) <= set(point_vars):
        require_positive(f)
        node = f

        def prep_slfp(struct: FiniteStructure) -> PointFn:
            fix = lfp_fixpoint(node, struct)

            def at(pt: tuple[int, ...]) -> bool:
                env = dict(zip(point_vars, pt))
                tup = tuple(eval_term(t, struct, env) for t in node.args)
                return tup in fix[node.goal]
            return at
        return prep_slfp

    if is_first_order(f):
        def prep_fo(struct: FiniteStructure) -> PointFn:
            return lambda pt: eval_fo(f, struct, dict(zip(point_vars, pt)))
        return prep_fo

    def prep_so(struct: FiniteStructure) -> PointFn:
        return lambda pt: eval_so_bruteforce(f, struct, dict(zip(point_vars, pt)),
                                             budget=budget)
    return prep_so


def _resolve_point_vars(a: Checkable, b: Checkable,
                        point_vars: Sequence[str] | None) -> tuple[str, ...]:
    frees: set[str] = set()
    arities: list[int] = []
    for side in (a, b):
        if isinstance(side, (DatalogQuery, StratifiedQuery)):
            arities.append(_query_arity(side))
        else:
            frees |= set(free_vars(_formula_of(side)))
    if point_vars is not None:
        pv = tuple(point_vars)
    elif frees or not arities:
        pv = tuple(sorted(frees))
    else:
        # two queries and no formula side: make up positional names
        pv = tuple(f"p{i}" for i in range(1, arities[0] + 1))
    if not frees <= set(pv):
        raise ValidationError(f"point variables {pv} do not cover {sorted(frees)}")
    for ar in arities:
        if ar != len(pv):
            raise ValidationError(
                f"query arity {ar} does not match {len(pv)} point variables")
    return pv


def _sweep(a: Checkable, b: Checkable, vocab: VocabularySpec, *,
           max_n: int, mode: str, budget: int, point_vars: Sequence[str] | None,
           samples: int, seed: int, same_means_violation: bool) -> EquivVerdict:
    if mode not in ("exhaustive", "sample"):
        raise ValidationError(f"unknown mode {mode!r}")
    pv = _resolve_point_vars(a, b, point_vars)
    prep_a = _prepare(a, pv, budget)
    prep_b = _prepare(b, pv, budget)
    checked = 0
    skipped = 0
    by_size: list[tuple[int, int]] = []
    for n in range(1, max_n + 1):
        count_n = 0
        if mode == "exhaustive":
            structs = enumerate_structures(vocab, n)
        else:
            structs = enumerate_structures(vocab, n, sample=samples, seed=seed + n)
        for struct in structs:
            try:
                fa = prep_a(struct)
                fb = prep_b(struct)
                for pt in itertools.product(range(n), repeat=len(pv)):
                    va = fa(pt)
                    vb = fb(pt)
                    bad = (va == vb) if same_means_violation else (va != vb)
                    if bad:
                        by_size.append((n, count_n))
                        return EquivVerdict(COUNTEREXAMPLE, checked, tuple(by_size),
                                            skipped, Counterexample(struct, pt, va, vb))
            except BudgetExceeded:
                skipped += 1
                continue
            checked += 1
            count_n += 1
        by_size.append((n, count_n))
    return EquivVerdict(EQUIVALENT, checked, tuple(by_size), skipped)


def check_equiv(a: Checkable, b: Checkable, vocab: VocabularySpec, *,
                max_n: int = 3, mode: str = "exhaustive", budget: int = 65536,
                point_vars: Sequence[str] | None = None, samples: int = 25,
                seed: int = 0) -> EquivVerdict:
    """Do both sides agree on every structure and every point?

    Exhaustive mode enumerates all structures of each size up to
    ``max_n``; sample mode draws ``samples`` seeded structures per size.
    Stops at the first disagreement.
    """
    return _sweep(a, b, vocab, max_n=max_n, mode=mode, budget=budget,
                  point_vars=point_vars, samples=samples, seed=seed,
                  same_means_violation=False)


def check_duality(phi: Union[Formula, SoFormula],
                  d: Union[DatalogQuery, tuple[DatalogProgram, str]],
                  vocab: VocabularySpec, *, max_n: int = 3, mode: str = "exhaustive",
                  budget: int = 65536, point_vars: Sequence[str] | None = None,
                  samples: int = 25, seed: int = 0) -> EquivVerdict:
    """The formula and the query must disagree everywhere.

    A Horn formula and its complement program satisfy exactly opposite
    points, so a structure and point where both report the same value
    witnesses a broken pair.
    """
    query = d if isinstance(d, DatalogQuery) else DatalogQuery(*d)
    return _sweep(phi, query, vocab, max_n=max_n, mode=mode, budget=budget,
                  point_vars=point_vars, samples=samples, seed=seed,
                  same_means_violation=True)


def check_closure(x: Checkable, direction: str, *, vocab: VocabularySpec,
                  trials: int = 200, seed: int = 0, max_n: int = 4,
                  budget: int = 65536,
                  point_vars: Sequence[str] | None = None) -> EquivVerdict:
    """Sample structure pairs and test that satisfaction survives.

    ``substructure``: if the sentence holds in A it must hold in every
    induced substructure (points restricted to surviving elements and
    renamed along).  ``extension``: if it holds at a point of A it must
    hold at the same point after new elements and tuples arrive.
    """
    if direction not in ("substructure", "extension"):
        raise ValidationError(f"unknown direction {direction!r}")
    if isinstance(x, (DatalogQuery, StratifiedQuery)):
        arity = _query_arity(x)
        pv: tuple[str, ...] = tuple(f"p{i}" for i in range(1, arity + 1))
    else:
        pv = _resolve_point_vars(x, x, point_vars)
    prep = _prepare(x, pv, budget)
    rng = random.Random(seed)
    checked = 0
    skipped = 0
    per_size: dict[int, int] = {}
    attempts = 0
    # a trial counts only when the base structure satisfies something, so
    # the implication under test is never vacuous
    while checked < trials and attempts < 50 * trials:
        attempts += 1
        n = rng.randint(2, max_n)
        base = _random_structure(rng, vocab, n)
        try:
            at_base = prep(base)
            sat = [pt for pt in itertools.product(range(n), repeat=len(pv))
                   if at_base(pt)]
            if not sat:
                continue
            if direction == "substructure":
                pinned = set(base.constants.values())
                loose = [e for e in range(n) if e not in pinned]
                if not loose:
                    continue
                drop = {rng.choice(loose)}
                keep = sorted(e for e in range(n)
                              if e not in drop and (e in pinned or rng.random() < 0.8))
                if not keep:
                    continue
                sub, remap = induced_substructure(base, keep)
                at_other = prep(sub)
                for pt in sat:
                    if not all(e in remap for e in pt):
                        continue
                    moved = tuple(remap[e] for e in pt)
                    if not at_other(moved):
                        per_size[n] = per_size.get(n, 0) + 1
                        return EquivVerdict(
                            COUNTEREXAMPLE, checked, tuple(sorted(per_size.items())),
                            skipped, Counterexample(base, pt, True, False))
            else:
                ext = extend_structure(base, rng.randint(1, 2),
                                       seed=rng.randrange(2 ** 30))
                at_other = prep(ext)
                for pt in sat:
                    if not at_other(pt):
                        per_size[n] = per_size.get(n, 0) + 1
                        return EquivVerdict(
                            COUNTEREXAMPLE, checked, tuple(sorted(per_size.items())),
                            skipped, Counterexample(ext, pt, True, False))
        except BudgetExceeded:
            skipped += 1
            continue
        checked += 1
        per_size[n] = per_size.get(n, 0) + 1
    return EquivVerdict(EQUIVALENT, checked, tuple(sorted(per_size.items())), skipped)


def _random_structure(rng: random.Random, vocab: VocabularySpec,
                      size: int) -> FiniteStructure:
    density = rng.uniform(0.1, 0.9)
    rels = {}
    for sym, arity in vocab.relations:
        rels[sym] = frozenset(
            t for t in itertools.product(range(size), repeat=arity)
            if rng.random() < density)
    return FiniteStructure(vocab, size, rels,
                           {c: rng.randrange(size) for c in vocab.constants})


# --- the example corpus ---------------------------------------------------------

EDGE_VOCAB = VocabularySpec((("E", 2),), ())
ST_VOCAB = VocabularySpec((("E", 2),), ("s", "t"))
UVE_VOCAB = VocabularySpec((("U", 1), ("V", 1), ("E", 2)), ())
ORDER_VOCAB = VocabularySpec((("P", 1), ("Lt", 2), ("Succ", 2)), ("min", "max"))


@dataclass(frozen=True, slots=True)
class CorpusItem:
    name: str
    kind: str
    payload: object
    vocab: VocabularySpec
    tags: tuple[str, ...] = ()
    note: str = ""


def _x(name: str) -> Var:
    return Var(name)


def _st_path_query() -> DatalogQuery:
    x, y, z = _x("x"), _x("y"), _x("z")
    rules = (
        DatalogRule(Rel("R", (x, y)), (Rel("E", (x, y)),)),
        DatalogRule(Rel("R", (x, y)), (Rel("E", (x, z)), Rel("R", (z, y)))),
        DatalogRule(Rel("Q", ()), (Rel("R", (Cst("s"), Cst("t"))),)),
    )
    return DatalogQuery(DatalogProgram(ST_VOCAB, rules), "Q")


def _reach_query() -> DatalogQuery:
    x, y, z = _x("x"), _x("y"), _x("z")
    rules = (
        DatalogRule(Rel("R", (x, y)), (Rel("E", (x, y)),)),
        DatalogRule(Rel("R", (x, y)), (Rel("E", (x, z)), Rel("R", (z, y)))),
    )
    return DatalogQuery(DatalogProgram(EDGE_VOCAB, rules), "R")


def _reach_all_query(star: bool) -> DatalogQuery:
    # R carries its columns swapped, R(y,x) meaning "x reaches y", so the
    # universal test on the first position fits the leading-variable shape
    x, y, z = _x("x"), _x("y"), _x("z")
    if star:
        step1: tuple = (Cond(Or((Rel("E", (x, y)), Rel("E", (y, x))))),)
        step2: tuple = (Cond(Or((Rel("E", (x, z)), Rel("E", (z, x))))),
                        Rel("R", (y, z)))
    else:
        step1 = (Rel("E", (x, y)),)
        step2 = (Rel("E", (x, z)), Rel("R", (y, z)))
    rules = (
        DatalogRule(Rel("R", (y, x)), step1),
        DatalogRule(Rel("R", (y, x)), step2),
        DatalogRule(Rel("Q", (x,)), (UnivAtom(("y",), "R", (y, x)),)),
    )
    return DatalogQuery(DatalogProgram(EDGE_VOCAB, rules), "Q")


def _no_path_stratified() -> StratifiedQuery:
    x, y, z = _x("x"), _x("y"), _x("z")
    lower = DatalogProgram(EDGE_VOCAB, (
        DatalogRule(Rel("R", (x, y)), (Rel("E", (x, y)),)),
        DatalogRule(Rel("R", (x, y)), (Rel("E", (x, z)), Rel("R", (z, y)))),
    ))
    upper = DatalogProgram(EDGE_VOCAB.extend((("R", 2),)), (
        DatalogRule(Rel("P", (x, y)), (Not(Rel("R", (x, y))),)),
    ))
    return StratifiedQuery(StratifiedProgram((lower, upper)), "P")


def _no_st_path_sentence() -> SoFormula:
    # S collects everything one or more edges away from s, so the pair is
    # the exact complement of the path query even when s and t coincide
    x, y = _x("x"), _x("y")
    clauses = (
        HornClause((), (Rel("E", (Cst("s"), x)),), Rel("S", (x,))),
        HornClause((Rel("S", (x,)),), (Rel("E", (x, y)),), Rel("S", (y,))),
        HornClause((Rel("S", (Cst("t"),)),), (), None),
    )
    return SoFormula((SoQuant(EXISTS, "S", 1),), ClausalCore(("x", "y"), clauses))


def _u_avoids_v_sentence() -> SoFormula:
    x, y = _x("x"), _x("y")
    clauses = (
        HornClause((), (Rel("U", (x,)),), Rel("S", (x,))),
        HornClause((Rel("S", (x,)),), (Rel("E", (x, y)),), Rel("S", (y,))),
        HornClause((Rel("S", (x,)),), (Rel("V", (x,)),), None),
    )
    return SoFormula((SoQuant(EXISTS, "S", 1),), ClausalCore(("x", "y"), clauses))


def _unsat_sentence() -> SoFormula:
    """For every valuation some clause set covers all falsified clauses.

    Holds on a clause-variable encoding exactly when the encoded CNF
    has no satisfying assignment.
    """
    x, y, z = _x("x"), _x("y"), _x("z")
    some_outside = Not(forall_block(("z",), Rel("Y", (z,))))
    outside_is_clause = Implies(Not(Rel("Y", (x,))), Rel("Cla", (x,)))
    pos_kills = Implies(
        And((Rel("Cla", (x,)), Rel("Var", (y,)), Not(Rel("Y", (x,))),
             Rel("P", (x, y)))),
        Not(Rel("X", (y,))))
    neg_forces = Implies(
        And((Rel("Cla", (x,)), Rel("Var", (y,)), Not(Rel("Y", (x,))),
             Rel("N", (x, y)))),
        Rel("X", (y,)))
    body = forall_block(("x", "y"), And((some_outside, outside_is_clause,
                                         pos_kills, neg_forces)))
    return SoFormula((SoQuant(FORALL, "X", 1), SoQuant(EXISTS, "Y", 1)), body)


def make_ordered_structure(n: int, pset: Sequence[int] | None = None,
                           ) -> FiniteStructure:
    """The canonical order on {0..n-1}: Lt, its successor pairs, min, max."""
    if n < 1:
        raise ValidationError("ordered structure needs at least one element")
    members = range(n) if pset is None else pset
    return FiniteStructure(ORDER_VOCAB, n, {
        "P": frozenset((i,) for i in members),
        "Lt": frozenset((i, j) for i in range(n) for j in range(n) if i < j),
        "Succ": frozenset((i, i + 1) for i in range(n - 1)),
    }, {"min": 0, "max": n - 1})


def _order_guard_rules() -> list[DatalogRule]:
    """Zero-ary validity flags for the order and successor relations.

    OrdYes holds when Lt is a strict linear order with min least;
    OrdNo is its complement.  SuccYes holds when Succ is exactly the
    immediate-successor relation of Lt; SuccNo is its complement.
    """
    x, y, z = _x("x"), _x("y"), _x("z")
    mn = Cst("min")
    rules = [
        # strict order, clause by clause, each closed off by a universal atom
        DatalogRule(Rel("IrrOK", (x,)), (Not(Rel("Lt", (x, x))),)),
        DatalogRule(Rel("TrOK", (x, y, z)), (Not(Rel("Lt", (x, y))),)),
        DatalogRule(Rel("TrOK", (x, y, z)), (Not(Rel("Lt", (y, z))),)),
        DatalogRule(Rel("TrOK", (x, y, z)), (Rel("Lt", (x, z)),)),
        DatalogRule(Rel("TotOK", (x, y)), (Eq(x, y),)),
        DatalogRule(Rel("TotOK", (x, y)), (Rel("Lt", (x, y)),)),
        DatalogRule(Rel("TotOK", (x, y)), (Rel("Lt", (y, x)),)),
        DatalogRule(Rel("MinOK", (x,)), (Eq(x, mn),)),
        DatalogRule(Rel("MinOK", (x,)), (Rel("Lt", (mn, x)),)),
        DatalogRule(Rel("OrdYes", ()), (
            UnivAtom(("x",), "IrrOK", (x,)),
            UnivAtom(("x", "y", "z"), "TrOK", (x, y, z)),
            UnivAtom(("x", "y"), "TotOK", (x, y)),
            UnivAtom(("x",), "MinOK", (x,)),
        )),
        DatalogRule(Rel("OrdNo", ()), (Rel("Lt", (x, x)),)),
        DatalogRule(Rel("OrdNo", ()), (Rel("Lt", (x, y)), Rel("Lt", (y, z)),
                                       Not(Rel("Lt", (x, z))))),
        DatalogRule(Rel("OrdNo", ()), (Not(Rel("Lt", (x, y))),
                                       Not(Rel("Lt", (y, x))), Not(Eq(x, y)))),
        DatalogRule(Rel("OrdNo", ()), (Not(Eq(x, mn)), Not(Rel("Lt", (mn, x))))),
        # successor soundness and completeness against Lt
        DatalogRule(Rel("Btw", (x, y)), (Rel("Lt", (x, z)), Rel("Lt", (z, y)))),
        DatalogRule(Rel("Gap3", (z, x, y)), (Not(Rel("Lt", (x, z))),)),
        DatalogRule(Rel("Gap3", (z, x, y)), (Not(Rel("Lt", (z, y))),)),
        DatalogRule(Rel("Gap", (x, y)), (UnivAtom(("z",), "Gap3", (z, x, y)),)),
        DatalogRule(Rel("SuccA", (x, y)), (Not(Rel("Succ", (x, y))),)),
        DatalogRule(Rel("SuccA", (x, y)), (Rel("Lt", (x, y)), Rel("Gap", (x, y)))),
        DatalogRule(Rel("SuccB", (x, y)), (Not(Rel("Lt", (x, y))),)),
        DatalogRule(Rel("SuccB", (x, y)), (Rel("Btw", (x, y)),)),
        DatalogRule(Rel("SuccB", (x, y)), (Rel("Succ", (x, y)),)),
        DatalogRule(Rel("SuccYes", ()), (
            UnivAtom(("x", "y"), "SuccA", (x, y)),
            UnivAtom(("x", "y"), "SuccB", (x, y)),
        )),
        DatalogRule(Rel("SuccNo", ()), (Rel("Succ", (x, y)),
                                        Not(Rel("Lt", (x, y))))),
        DatalogRule(Rel("SuccNo", ()), (Rel("Succ", (x, y)), Rel("Lt", (x, z)),
                                        Rel("Lt", (z, y)))),
        DatalogRule(Rel("SuccNo", ()), (Rel("Lt", (x, y)), Rel("Gap", (x, y)),
                                        Not(Rel("Succ", (x, y))))),
    ]
    return rules


def _slow_copy_query() -> DatalogQuery:
    """P' copies P, but walks the order one element per round when it can.

    On a garbage order or successor relation the complement guards fire
    and P' fills in immediately, so the query always means P(x); on the
    canonical n-element order the walk needs more than n rounds.
    """
    x, y = _x("x"), _x("y")
    rules = _order_guard_rules()
    ok = (Rel("OrdYes", ()), Rel("SuccYes", ()))
    rules += [
        DatalogRule(Rel("Q", (Cst("min"),)), ok),
        DatalogRule(Rel("Q", (y,)), (Rel("Q", (x,)), Rel("Succ", (x, y))) + ok),
        DatalogRule(Rel("P'", (x,)), (Rel("Q", (x,)), Rel("P", (x,))) + ok),
        DatalogRule(Rel("P'", (x,)), (Rel("P", (x,)), Rel("OrdYes", ()),
                                      Rel("SuccNo", ()))),
        DatalogRule(Rel("P'", (x,)), (Rel("P", (x,)), Rel("OrdNo", ()))),
    ]
    return DatalogQuery(DatalogProgram(ORDER_VOCAB, tuple(rules)), "P'")


CNF_EXAMPLE: tuple[tuple[int, ...], ...] = ((1, 3), (2, -3), (1, 2))


def corpus() -> tuple[CorpusItem, ...]:
    """The named artifacts the lab and the test suite keep coming back to."""
    return (
        CorpusItem("st_path", "datalog", _st_path_query(), ST_VOCAB,
                   ("plain-datalog", "extension-closed"),
                   "is there a directed path from s to t"),
        CorpusItem("reach", "datalog", _reach_query(), EDGE_VOCAB,
                   ("plain-datalog", "extension-closed"),
                   "binary reachability, the goal relation is the path relation"),
        CorpusItem("reach_all", "datalog", _reach_all_query(False), EDGE_VOCAB,
                   ("datalog-r",),
                   "vertices that reach every vertex"),
        CorpusItem("reach_all_sym", "datalog", _reach_all_query(True), EDGE_VOCAB,
                   ("datalog-star-r", "extension-fragile"),
                   "vertices that reach every vertex along the symmetrized graph"),
        CorpusItem("no_path", "s-datalog", _no_path_stratified(), EDGE_VOCAB,
                   ("s-datalog",),
                   "pairs with no directed path, by negating reachability"),
        CorpusItem("slow_copy", "datalog", _slow_copy_query(), ORDER_VOCAB,
                   ("datalog-r", "unbounded"),
                   "means P(x) everywhere, yet needs more than n rounds on the "
                   "canonical n-element order"),
        CorpusItem("no_st_path", "so-sentence", _no_st_path_sentence(), ST_VOCAB,
                   ("horn", "substructure-closed"),
                   "no directed path from s to t"),
        CorpusItem("u_avoids_v", "so-sentence", _u_avoids_v_sentence(), UVE_VOCAB,
                   ("horn", "substructure-closed"),
                   "nothing marked V is reachable from anything marked U"),
        CorpusItem("cnf_unsat", "so-sentence", _unsat_sentence(), CNF_VOCAB,
                   ("ehorn-r",),
                   "holds on a clause-variable encoding iff the CNF is "
                   "unsatisfiable"),
        CorpusItem("cnf_example", "cnf", CNF_EXAMPLE, CNF_VOCAB,
                   (), "(p1 or p3) and (p2 or not p3) and (p1 or p2)"),
    )


def corpus_item(name: str) -> CorpusItem:
    for item in corpus():
        if item.name == name:
            return item
    raise ValidationError(f"no corpus item named {name!r}")
