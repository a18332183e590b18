"""Finite structures and first-order evaluation.

A structure is a finite relational database: a domain ``0..size-1``,
one set of tuples per relation symbol, and a point per constant.
Everything downstream (model checking, fixed points, rule programs)
evaluates against these.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .syntax import (
    And, ArityMismatch, Bottom, BudgetExceeded, Cst, Eq, Exists, Forall, Formula,
    HornlabError, Implies, Lfp, Not, Or, Rel, SLfp, SLfpComp, ShapeError, SoExists,
    SoForall, Term, Top, UnboundVariable, ValidationError, Var, FreshNames, conj,
    disj, free_vars, neg, rename_bound, term_constants,
)


@dataclass(frozen=True, slots=True)
class VocabularySpec:
    """Relation symbols with arities, plus constant symbols."""

    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for sym, arity in self.relations:
            if sym in seen:
                raise ValidationError(f"relation symbol {sym} declared twice")
            if arity < 0:
                raise ValidationError(f"negative arity for {sym}")
            seen.add(sym)
        for c in self.constants:
            if c in seen:
                raise ValidationError(f"symbol {c} used as both relation and constant")
            seen.add(c)
        if len(set(self.constants)) != len(self.constants):
            raise ValidationError("constant symbol declared twice")

    def arity(self, sym: str) -> int:
        for s, a in self.relations:
            if s == sym:
                return a
        raise ValidationError(f"unknown relation symbol {sym}")

    def has_relation(self, sym: str) -> bool:
        return any(s == sym for s, _ in self.relations)

    def extend(self, new_relations: Iterable[tuple[str, int]] = (),
               new_constants: Iterable[str] = ()) -> "VocabularySpec":
        return VocabularySpec(self.relations + tuple(new_relations),
                              self.constants + tuple(new_constants))

    def arity_map(self) -> dict[str, int]:
        return dict(self.relations)


@dataclass(frozen=True)
class FiniteStructure:
    vocab: VocabularySpec
    size: int
    relations: Mapping[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValidationError("domain must be non-empty")
        rels = {sym: frozenset(map(tuple, self.relations.get(sym, ())))
                for sym, _ in self.vocab.relations}
        for sym in self.relations:
            if not self.vocab.has_relation(sym):
                raise ValidationError(f"relation {sym} not in vocabulary")
        for sym, arity in self.vocab.relations:
            for tup in rels[sym]:
                if len(tup) != arity:
                    raise ArityMismatch(f"{sym} holds a tuple of length {len(tup)}, arity is {arity}")
                if any(not (0 <= e < self.size) for e in tup):
                    raise ValidationError(f"{sym} holds a tuple outside the domain: {tup}")
        csts = dict(self.constants)
        for c in self.vocab.constants:
            if c not in csts:
                raise ValidationError(f"constant {c} has no value")
            if not (0 <= csts[c] < self.size):
                raise ValidationError(f"constant {c} maps outside the domain")
        for c in csts:
            if c not in self.vocab.constants:
                raise ValidationError(f"constant {c} not in vocabulary")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", csts)

    def relation(self, sym: str) -> frozenset[tuple[int, ...]]:
        try:
            return self.relations[sym]
        except KeyError:
            raise ValidationError(f"unknown relation symbol {sym}") from None

    def with_relations(self, updates: Mapping[str, Iterable[tuple[int, ...]]],
                       vocab: VocabularySpec | None = None) -> "FiniteStructure":
        rels = dict(self.relations)
        for sym, tuples in updates.items():
            rels[sym] = frozenset(tuples)
        return FiniteStructure(vocab or self.vocab, self.size, rels, dict(self.constants))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteStructure):
            return NotImplemented
        return (self.vocab == other.vocab and self.size == other.size
                and dict(self.relations) == dict(other.relations)
                and dict(self.constants) == dict(other.constants))

    def __hash__(self) -> int:
        return hash((self.vocab, self.size,
                     tuple(sorted((s, tuple(sorted(ts))) for s, ts in self.relations.items())),
                     tuple(sorted(self.constants.items()))))


_MISSING = object()


def eval_term(t: Term, struct: FiniteStructure, env: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariable(f"variable {t.name} has no value") from None
    try:
        return struct.constants[t.name]
    except KeyError:
        raise UnboundVariable(f"constant {t.name} has no value") from None


def eval_fo(phi: Formula, struct: FiniteStructure,
            env: dict[str, int] | None = None,
            rel_env: Mapping[str, frozenset[tuple[int, ...]]] | None = None) -> bool:
    """Model checking for first-order formulas, including fixed-point nodes.

    ``rel_env`` supplies interpretations for relation symbols outside the
    structure's vocabulary (quantified or fixed-point bound ones); it
    shadows the structure on lookup.  Relation quantifiers themselves are
    not handled here.
    """
    if env is None:
        env = {}

    def lookup(sym: str) -> frozenset[tuple[int, ...]]:
        if rel_env is not None and sym in rel_env:
            return rel_env[sym]
        return struct.relation(sym)

    def ev(f: Formula) -> bool:
        match f:
            case Rel(sym, args):
                return tuple(eval_term(t, struct, env) for t in args) in lookup(sym)
            case Eq(l, r):
                return eval_term(l, struct, env) == eval_term(r, struct, env)
            case Top():
                return True
            case Bottom():
                return False
            case Not(b):
                return not ev(b)
            case And(ps):
                return all(ev(p) for p in ps)
            case Or(ps):
                return any(ev(p) for p in ps)
            case Implies(l, r):
                return (not ev(l)) or ev(r)
            case Forall(v, b):
                old = env.get(v, _MISSING)
                try:
                    for d in range(struct.size):
                        env[v] = d
                        if not ev(b):
                            return False
                    return True
                finally:
                    if old is _MISSING:
                        env.pop(v, None)
                    else:
                        env[v] = old
            case Exists(v, b):
                old = env.get(v, _MISSING)
                try:
                    for d in range(struct.size):
                        env[v] = d
                        if ev(b):
                            return True
                    return False
                finally:
                    if old is _MISSING:
                        env.pop(v, None)
                    else:
                        env[v] = old
            case Lfp(rvar, vs, b, args):
                tup = tuple(eval_term(t, struct, env) for t in args)
                sets = fixpoint_sets(((rvar, vs, b),), struct, env, rel_env)
                return tup in sets[rvar]
            case SLfp(comps, goal, args):
                tup = tuple(eval_term(t, struct, env) for t in args)
                sets = fixpoint_sets(tuple((c.rvar, c.vars, c.body) for c in comps),
                                     struct, env, rel_env)
                if goal not in sets:
                    raise ShapeError(f"goal {goal} is not a component of the fixed point")
                return tup in sets[goal]
            case SoExists(_, _, _) | SoForall(_, _, _):
                raise ShapeError("relation quantifier reached the first-order evaluator")
        raise ShapeError(f"not a formula node: {f!r}")

    return ev(phi)


def fixpoint_sets(comps: tuple[tuple[str, tuple[str, ...], Formula], ...],
                  struct: FiniteStructure,
                  env: dict[str, int] | None = None,
                  rel_env: Mapping[str, frozenset[tuple[int, ...]]] | None = None,
                  ) -> dict[str, frozenset[tuple[int, ...]]]:
    """Iterate all components simultaneously from empty until stable.

    The rounds update every component from the same previous snapshot.
    For non-monotone bodies the iteration can cycle; a step cap turns
    that into an error instead of a hang.
    """
    if env is None:
        env = {}
    names = [rvar for rvar, _, _ in comps]
    if len(set(names)) != len(names):
        raise ValidationError("fixed-point components share a name")
    current: dict[str, frozenset[tuple[int, ...]]] = {r: frozenset() for r in names}
    cap = 2 + sum(struct.size ** len(vs) for _, vs, _ in comps)
    for _ in range(cap):
        overlay = dict(rel_env) if rel_env else {}
        overlay.update(current)
        nxt: dict[str, frozenset[tuple[int, ...]]] = {}
        for rvar, vs, body in comps:
            saved = {v: env.get(v, _MISSING) for v in vs}
            hits = []
            for tup in itertools.product(range(struct.size), repeat=len(vs)):
                for v, d in zip(vs, tup):
                    env[v] = d
                if eval_fo(body, struct, env, overlay):
                    hits.append(tup)
            for v, old in saved.items():
                if old is _MISSING:
                    env.pop(v, None)
                else:
                    env[v] = old
            nxt[rvar] = frozenset(hits)
        if nxt == current:
            return current
        current = nxt
    raise ValidationError("fixed-point iteration did not converge; check positivity")


Lit = Formula  # an atom, an equality, or a negation of one


def is_literal(f: Formula) -> bool:
    match f:
        case Rel(_, _) | Eq(_, _) | Top() | Bottom():
            return True
        case Not(Rel(_, _)) | Not(Eq(_, _)):
            return True
        case _:
            return False


def fold_constants(phi: Formula) -> Formula:
    """Simplify with truth-constant laws and reflexive equations."""
    match phi:
        case Rel(_, _) | Top() | Bottom():
            return phi
        case Eq(l, r):
            return Top() if l == r else phi
        case Not(b):
            return neg(fold_constants(b))
        case And(ps):
            return conj(fold_constants(p) for p in ps)
        case Or(ps):
            return disj(fold_constants(p) for p in ps)
        case Implies(l, r):
            fl, fr = fold_constants(l), fold_constants(r)
            if isinstance(fl, Top):
                return fr
            if isinstance(fl, Bottom) or isinstance(fr, Top):
                return Top()
            if isinstance(fr, Bottom):
                return neg(fl)
            return Implies(fl, fr)
        case Forall(v, b):
            fb = fold_constants(b)
            if isinstance(fb, (Top, Bottom)):
                return fb
            return Forall(v, fb)
        case Exists(v, b):
            fb = fold_constants(b)
            if isinstance(fb, (Top, Bottom)):
                return fb
            return Exists(v, fb)
        case SoExists(sym, a, b):
            fb = fold_constants(b)
            if isinstance(fb, (Top, Bottom)):
                return fb
            return SoExists(sym, a, fb)
        case SoForall(sym, a, b):
            fb = fold_constants(b)
            if isinstance(fb, (Top, Bottom)):
                return fb
            return SoForall(sym, a, fb)
        case Lfp(_, _, _, _) | SLfp(_, _, _):
            return phi
    raise ShapeError(f"not a formula node: {phi!r}")


def to_nnf(phi: Formula) -> Formula:
    """Negation normal form.  First-order input only."""
    match phi:
        case Rel(_, _) | Eq(_, _) | Top() | Bottom():
            return phi
        case And(ps):
            return And(tuple(to_nnf(p) for p in ps))
        case Or(ps):
            return Or(tuple(to_nnf(p) for p in ps))
        case Implies(l, r):
            return disj((to_nnf(Not(l)), to_nnf(r)))
        case Forall(v, b):
            return Forall(v, to_nnf(b))
        case Exists(v, b):
            return Exists(v, to_nnf(b))
        case Not(b):
            match b:
                case Rel(_, _) | Eq(_, _):
                    return phi
                case Top():
                    return Bottom()
                case Bottom():
                    return Top()
                case Not(bb):
                    return to_nnf(bb)
                case And(ps):
                    return Or(tuple(to_nnf(Not(p)) for p in ps))
                case Or(ps):
                    return And(tuple(to_nnf(Not(p)) for p in ps))
                case Implies(l, r):
                    return conj((to_nnf(l), to_nnf(Not(r))))
                case Forall(v, bb):
                    return Exists(v, to_nnf(Not(bb)))
                case Exists(v, bb):
                    return Forall(v, to_nnf(Not(bb)))
    raise ShapeError(f"negation normal form needs first-order input, got {phi!r}")


def _pull_prefix(phi: Formula) -> tuple[list[tuple[str, str]], Formula]:
    """Extract the quantifier prefix of an NNF formula with distinct bound names."""
    match phi:
        case Forall(v, b):
            prefix, matrix = _pull_prefix(b)
            return [("forall", v)] + prefix, matrix
        case Exists(v, b):
            prefix, matrix = _pull_prefix(b)
            return [("exists", v)] + prefix, matrix
        case And(ps) | Or(ps):
            prefix: list[tuple[str, str]] = []
            parts = []
            for p in ps:
                pre, m = _pull_prefix(p)
                prefix.extend(pre)
                parts.append(m)
            node = And if isinstance(phi, And) else Or
            return prefix, node(tuple(parts))
        case _:
            return [], phi


@dataclass(frozen=True, slots=True)
class PrenexDnf:
    """Prefix of (quantifier, variable) pairs over a disjunction of conjunctions."""

    prefix: tuple[tuple[str, str], ...]
    matrix: tuple[tuple[Lit, ...], ...]

    def to_formula(self) -> Formula:
        body = disj(conj(c) for c in self.matrix)
        for q, v in reversed(self.prefix):
            body = Forall(v, body) if q == "forall" else Exists(v, body)
        return body


def _complementary(a: Lit, b: Lit) -> bool:
    return (isinstance(b, Not) and b.body == a) or (isinstance(a, Not) and a.body == b)


def _tidy_conjunct(lits: Sequence[Lit]) -> tuple[Lit, ...] | None:
    """Drop redundant literals; None when the conjunct is unsatisfiable."""
    out: list[Lit] = []
    for lit in lits:
        if isinstance(lit, Top):
            continue
        if isinstance(lit, Bottom):
            return None
        if isinstance(lit, Eq) and lit.lhs == lit.rhs:
            continue
        if isinstance(lit, Not) and isinstance(lit.body, Eq) and lit.body.lhs == lit.body.rhs:
            return None
        if lit in out:
            continue
        if any(_complementary(lit, o) for o in out):
            return None
        out.append(lit)
    return tuple(out)


def _distribute_dnf(phi: Formula, budget: int) -> list[tuple[Lit, ...]]:
    match phi:
        case Or(ps):
            acc: list[tuple[Lit, ...]] = []
            for p in ps:
                acc.extend(_distribute_dnf(p, budget))
                if sum(len(c) for c in acc) > budget:
                    raise BudgetExceeded("disjunctive normal form too large",
                                         required=sum(len(c) for c in acc))
            return acc
        case And(ps):
            acc = [()]
            for p in ps:
                branch = _distribute_dnf(p, budget)
                acc = [c + d for c in acc for d in branch]
                if sum(len(c) for c in acc) > budget:
                    raise BudgetExceeded("disjunctive normal form too large",
                                         required=sum(len(c) for c in acc))
            return acc
        case _ if is_literal(phi):
            return [(phi,)]
    raise ShapeError(f"matrix is not quantifier-free: {phi!r}")


def to_prenex_dnf(phi: Formula, max_matrix_literals: int = 10_000) -> PrenexDnf:
    """Prenex the formula and put its matrix in disjunctive normal form.

    The quantifier prefix keeps source order (outer to inner, left to
    right).  Unsatisfiable conjuncts are dropped; a valid matrix comes
    back as a single empty conjunct.
    """
    simplified = fold_constants(phi)
    fresh = FreshNames(free_vars(simplified) | {t for t in _all_names(simplified)})
    renamed = rename_bound(simplified, fresh)
    nnf = to_nnf(renamed)
    prefix, matrix_formula = _pull_prefix(nnf)
    raw = _distribute_dnf(matrix_formula, max_matrix_literals)
    conjuncts: list[tuple[Lit, ...]] = []
    for c in raw:
        tidy = _tidy_conjunct(c)
        if tidy is None:
            continue
        if tidy == ():
            # one true disjunct makes the matrix valid
            return PrenexDnf(tuple(prefix), ((),))
        if tidy not in conjuncts:
            conjuncts.append(tidy)
    return PrenexDnf(tuple(prefix), tuple(conjuncts))


def to_cnf_matrix(phi: Formula, max_matrix_literals: int = 10_000) -> tuple[tuple[Lit, ...], ...]:
    """Conjunctive normal form of a quantifier-free formula, as clause tuples.

    Valid clauses are dropped; an unsatisfiable matrix comes back as a
    single empty clause.
    """
    nnf = to_nnf(fold_constants(phi))
    # CNF of phi = complement of DNF of its negation, clause by clause
    dual = _distribute_dnf(to_nnf(neg(nnf)), max_matrix_literals)
    clauses: list[tuple[Lit, ...]] = []
    for c in dual:
        lits = tuple(_nnf_literal_neg(l) for l in c)
        tidy = _tidy_clause(lits)
        if tidy is None:
            continue
        if tidy == ():
            return ((),)
        if tidy not in clauses:
            clauses.append(tidy)
    return tuple(clauses)


def _nnf_literal_neg(lit: Lit) -> Lit:
    if isinstance(lit, Not):
        return lit.body
    if isinstance(lit, Top):
        return Bottom()
    if isinstance(lit, Bottom):
        return Top()
    return Not(lit)


def _tidy_clause(lits: Sequence[Lit]) -> tuple[Lit, ...] | None:
    """Drop redundant literals; None when the clause is valid."""
    out: list[Lit] = []
    for lit in lits:
        if isinstance(lit, Bottom):
            continue
        if isinstance(lit, Top):
            return None
        if isinstance(lit, Eq) and lit.lhs == lit.rhs:
            return None
        if isinstance(lit, Not) and isinstance(lit.body, Eq) and lit.body.lhs == lit.body.rhs:
            continue
        if lit in out:
            continue
        if any(_complementary(lit, o) for o in out):
            return None
        out.append(lit)
    return tuple(out)


def _all_names(phi: Formula) -> set[str]:
    """Every variable name occurring anywhere, bound or free."""
    out: set[str] = set()

    def walk(f: Formula) -> None:
        match f:
            case Rel(_, args):
                out.update(t.name for t in args if isinstance(t, Var))
            case Eq(l, r):
                out.update(t.name for t in (l, r) if isinstance(t, Var))
            case Top() | Bottom():
                pass
            case Not(b):
                walk(b)
            case And(ps) | Or(ps):
                for p in ps:
                    walk(p)
            case Implies(l, r):
                walk(l)
                walk(r)
            case Forall(v, b) | Exists(v, b):
                out.add(v)
                walk(b)
            case SoExists(_, _, b) | SoForall(_, _, b):
                walk(b)
            case Lfp(_, vs, b, args):
                out.update(vs)
                out.update(t.name for t in args if isinstance(t, Var))
                walk(b)
            case SLfp(comps, _, args):
                out.update(t.name for t in args if isinstance(t, Var))
                for c in comps:
                    out.update(c.vars)
                    walk(c.body)
            case _:
                raise ShapeError(f"not a formula node: {f!r}")

    walk(phi)
    return out


def count_structures(vocab: VocabularySpec, size: int) -> int:
    total = size ** len(vocab.constants)
    for _, arity in vocab.relations:
        total *= 2 ** (size ** arity)
    return total


def _tuple_universe(size: int, arity: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(size), repeat=arity))


def enumerate_structures(vocab: VocabularySpec, size: int, *,
                         sample: int | None = None, seed: int = 0,
                         budget: int = 1_000_000) -> Iterator[FiniteStructure]:
    """All structures of the given size, or a seeded random sample.

    Exhaustive order is deterministic: constants vary slowest, then each
    relation's content read as a bit mask over the lexicographic tuple
    order.  Sampling draws independently, so repeats are possible.
    """
    universes = {sym: _tuple_universe(size, arity) for sym, arity in vocab.relations}
    if sample is None:
        total = count_structures(vocab, size)
        if total > budget:
            raise BudgetExceeded(
                f"{total} structures of size {size} exceed the budget of {budget}",
                required=total)
        const_space = itertools.product(range(size), repeat=len(vocab.constants))
        for const_vals in const_space:
            consts = dict(zip(vocab.constants, const_vals))
            mask_spaces = [range(2 ** len(universes[sym])) for sym, _ in vocab.relations]
            for masks in itertools.product(*mask_spaces):
                rels = {}
                for (sym, _), mask in zip(vocab.relations, masks):
                    uni = universes[sym]
                    rels[sym] = frozenset(uni[i] for i in range(len(uni)) if mask >> i & 1)
                yield FiniteStructure(vocab, size, rels, consts)
    else:
        rng = random.Random(seed)
        for _ in range(sample):
            consts = {c: rng.randrange(size) for c in vocab.constants}
            rels = {sym: frozenset(t for t in universes[sym] if rng.random() < 0.5)
                    for sym, _ in vocab.relations}
            yield FiniteStructure(vocab, size, rels, consts)


def structures_up_to(vocab: VocabularySpec, max_size: int, *,
                     budget: int = 1_000_000) -> Iterator[FiniteStructure]:
    for n in range(1, max_size + 1):
        yield from enumerate_structures(vocab, n, budget=budget)


def induced_substructure(struct: FiniteStructure, subset: Iterable[int],
                         ) -> tuple[FiniteStructure, dict[int, int]]:
    """Restrict to a subset of the domain.  Constants must survive."""
    elems = sorted(set(subset))
    if not elems:
        raise ValidationError("substructure needs a non-empty domain")
    if any(not (0 <= e < struct.size) for e in elems):
        raise ValidationError("subset contains elements outside the domain")
    remap = {e: i for i, e in enumerate(elems)}
    keep = set(elems)
    rels = {}
    for sym, tuples in struct.relations.items():
        rels[sym] = frozenset(tuple(remap[e] for e in t)
                              for t in tuples if all(e in keep for e in t))
    for c, v in struct.constants.items():
        if v not in keep:
            raise ValidationError(f"constant {c} falls outside the chosen subset")
    consts = {c: remap[v] for c, v in struct.constants.items()}
    return FiniteStructure(struct.vocab, len(elems), rels, consts), remap


def extend_structure(struct: FiniteStructure, extra: int, seed: int = 0) -> FiniteStructure:
    """Add fresh elements and random tuples that touch at least one of them.

    Old tuples are kept unchanged, so the original structure is the
    substructure induced by the old domain.
    """
    if extra < 0:
        raise ValidationError("cannot extend by a negative element count")
    if extra == 0:
        return struct
    rng = random.Random(seed)
    new_size = struct.size + extra
    rels = {}
    for sym, arity in struct.vocab.relations:
        tuples = set(struct.relations[sym])
        for t in itertools.product(range(new_size), repeat=arity):
            if any(e >= struct.size for e in t) and rng.random() < 0.5:
                tuples.add(t)
        rels[sym] = frozenset(tuples)
    return FiniteStructure(struct.vocab, new_size, rels, dict(struct.constants))


CNF_VOCAB = VocabularySpec((("Cla", 1), ("Var", 1), ("P", 2), ("N", 2)), ())


def cnf_to_structure(clauses: Sequence[Sequence[int]]) -> FiniteStructure:
    """Encode a CNF as a structure over clauses and variable indices.

    Literals use the sign convention of DIMACS: variable k is the
    integer k, negated as -k, 1-based.  Element i is clause i and also
    variable i+1; the domain is as large as the bigger of the two counts.
    Membership of (i, j) in ``P`` or ``N`` says clause i contains the
    positive or negative literal of variable j+1.
    """
    num_clauses = len(clauses)
    if num_clauses == 0:
        raise ValidationError("need at least one clause")
    num_vars = 0
    for cl in clauses:
        for lit in cl:
            if not isinstance(lit, int) or lit == 0:
                raise ValidationError(f"bad literal {lit!r}; expected a non-zero integer")
            num_vars = max(num_vars, abs(lit))
    if num_vars == 0:
        raise ValidationError("need at least one literal")
    n = max(num_clauses, num_vars)
    pos = set()
    negs = set()
    for i, cl in enumerate(clauses):
        for lit in cl:
            if lit > 0:
                pos.add((i, lit - 1))
            else:
                negs.add((i, -lit - 1))
    rels = {
        "Cla": frozenset((i,) for i in range(num_clauses)),
        "Var": frozenset((j,) for j in range(num_vars)),
        "P": frozenset(pos),
        "N": frozenset(negs),
    }
    return FiniteStructure(CNF_VOCAB, n, rels, {})


def cnf_satisfiable(clauses: Sequence[Sequence[int]]) -> bool:
    """Brute-force satisfiability over the variables that occur."""
    num_vars = max((abs(l) for cl in clauses for l in cl), default=0)
    for bits in itertools.product((False, True), repeat=num_vars):
        ok = True
        for cl in clauses:
            if not any(bits[abs(l) - 1] if l > 0 else not bits[abs(l) - 1] for l in cl):
                ok = False
                break
        if ok:
            return True
    return False
