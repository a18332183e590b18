"""Second-order formulas with a clausal view.

A formula with relation quantifiers can be kept as a plain syntax tree,
or split into a quantifier prefix over a clausal core: a block of
universal individual variables over a conjunction of implication
clauses.  Most of the fragment conditions in this package (Horn with
respect to the quantified symbols, universal atoms only in leading
position, side conditions free of quantified symbols) are conditions on
that clausal view, so the normalizer here is what the classifier and
the transforms share.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union

from .core import FiniteStructure, eval_fo, fold_constants, is_literal
from .syntax import (
    And, Bottom, BudgetExceeded, Eq, Exists, Forall, Formula, FreshNames, Implies,
    Lfp, Not, Or, Rel, SLfp, ShapeError, SoExists, SoForall, Top, UnivAtom, Var,
    conj, forall_block, free_vars, is_first_order, is_quantifier_free, neg,
    rel_symbols, rename_bound,
)

EXISTS = "exists"
FORALL = "forall"


@dataclass(frozen=True, slots=True)
class SoQuant:
    q: str
    sym: str
    arity: int

    def __post_init__(self) -> None:
        if self.q not in (EXISTS, FORALL):
            raise ShapeError(f"bad relation quantifier kind {self.q!r}")


@dataclass(frozen=True, slots=True)
class SoEmbed:
    """A side condition that is itself a closed-over formula, possibly negated.

    Used by stratified clauses, where conditions refer to the result of a
    lower layer rather than to a first-order property.
    """

    formula: Union[Formula, "SoFormula"]
    negated: bool = False

    def to_formula(self) -> Formula:
        inner = (self.formula.to_formula() if isinstance(self.formula, SoFormula)
                 else self.formula)
        return neg(inner) if self.negated else inner


Beta = Union[Formula, SoEmbed]


@dataclass(frozen=True, slots=True)
class HornClause:
    """``alphas`` and ``betas`` imply ``head``; ``head=None`` means falsum.

    Alphas are atoms over the clausal symbols (universal atoms allowed),
    betas are side conditions that do not mention them.
    """

    alphas: tuple[Union[Rel, UnivAtom], ...] = ()
    betas: tuple[Beta, ...] = ()
    head: Rel | None = None

    def to_formula(self) -> Formula:
        parts: list[Formula] = []
        for a in self.alphas:
            if isinstance(a, UnivAtom):
                parts.append(forall_block(a.uvars, Rel(a.sym, a.args)))
            else:
                parts.append(a)
        for b in self.betas:
            parts.append(b.to_formula() if isinstance(b, SoEmbed) else b)
        consequent: Formula = self.head if self.head is not None else Bottom()
        antecedent = conj(parts)
        if isinstance(antecedent, Top):
            return consequent
        return Implies(antecedent, consequent)


@dataclass(frozen=True, slots=True)
class ClausalCore:
    uvars: tuple[str, ...]
    clauses: tuple[HornClause, ...]

    def to_formula(self) -> Formula:
        return forall_block(self.uvars, conj(c.to_formula() for c in self.clauses))


@dataclass(frozen=True, slots=True)
class SoFormula:
    prefix: tuple[SoQuant, ...]
    body: Union[Formula, ClausalCore]

    def to_formula(self) -> Formula:
        out = self.body.to_formula() if isinstance(self.body, ClausalCore) else self.body
        for q in reversed(self.prefix):
            out = SoExists(q.sym, q.arity, out) if q.q == EXISTS else SoForall(q.sym, q.arity, out)
        return out

    def core(self) -> ClausalCore:
        if not isinstance(self.body, ClausalCore):
            raise ShapeError("body has not been put in clausal form")
        return self.body


def strip_so_prefix(phi: Formula) -> tuple[tuple[SoQuant, ...], Formula]:
    prefix: list[SoQuant] = []
    while True:
        match phi:
            case SoExists(sym, arity, b):
                prefix.append(SoQuant(EXISTS, sym, arity))
                phi = b
            case SoForall(sym, arity, b):
                prefix.append(SoQuant(FORALL, sym, arity))
                phi = b
            case _:
                return tuple(prefix), phi


def as_so_formula(phi: Union[Formula, SoFormula]) -> SoFormula:
    if isinstance(phi, SoFormula):
        return phi
    prefix, body = strip_so_prefix(phi)
    return SoFormula(prefix, body)


def binders_apart(phi: Formula) -> bool:
    """True when no two binders share a name and none shadows a free variable."""
    seen: set[str] = set()
    ok = True

    def walk(f: Formula) -> None:
        nonlocal ok
        if not ok:
            return
        match f:
            case Forall(v, b) | Exists(v, b):
                if v in seen:
                    ok = False
                    return
                seen.add(v)
                walk(b)
            case Not(b) | SoExists(_, _, b) | SoForall(_, _, b):
                walk(b)
            case And(ps) | Or(ps):
                for p in ps:
                    walk(p)
            case Implies(l, r):
                walk(l)
                walk(r)
            case _:
                pass

    walk(phi)
    return ok and not (seen & free_vars(phi))


def _collect_clause_formulas(phi: Formula, uvars: list[str], out: list[Formula]) -> None:
    match phi:
        case Forall(v, b):
            uvars.append(v)
            _collect_clause_formulas(b, uvars, out)
        case And(ps):
            for p in ps:
                _collect_clause_formulas(p, uvars, out)
        case _:
            out.append(phi)


def _parse_univ_atom(f: Formula, clausal: frozenset[str]) -> UnivAtom | None:
    uvars: list[str] = []
    while isinstance(f, Forall):
        uvars.append(f.var)
        f = f.body
    if not isinstance(f, Rel) or f.sym not in clausal or not uvars:
        return None
    lead = f.args[: len(uvars)]
    if len(set(uvars)) != len(uvars):
        return None
    if lead != tuple(Var(u) for u in uvars):
        return None
    if any(isinstance(t, Var) and t.name in uvars for t in f.args[len(uvars):]):
        return None
    return UnivAtom(tuple(uvars), f.sym, f.args)


def _decompose_clause(clause: Formula, clausal: frozenset[str]) -> HornClause | None:
    """Split one clause into alphas, betas and head.  None when it is valid."""
    items: list[tuple[bool, Formula]] = []

    def walk(f: Formula, pos: bool) -> None:
        match f:
            case Rel(sym, _) if sym in clausal:
                items.append((pos, f))
                return
            case Not(b):
                walk(b, not pos)
                return
            case Implies(l, r):
                walk(l, not pos)
                walk(r, pos)
                return
            case Or(ps) if pos:
                for p in ps:
                    walk(p, pos)
                return
            case And(ps) if not pos:
                for p in ps:
                    walk(p, pos)
                return
        if not (rel_symbols(f) & clausal):
            items.append((pos, f))
            return
        if isinstance(f, Forall) and not pos:
            ua = _parse_univ_atom(f, clausal)
            if ua is None:
                raise ShapeError(
                    "universal quantifier over a clausal atom must bind the leading positions")
            items.append((False, ua))
            return
        raise ShapeError(f"clause is not Horn-shaped around {type(f).__name__}")

    walk(clause, True)
    heads: list[Rel] = []
    alphas: list[Union[Rel, UnivAtom]] = []
    betas: list[Formula] = []
    for pos, f in items:
        if isinstance(f, UnivAtom):
            alphas.append(f)
        elif isinstance(f, Rel) and f.sym in clausal:
            if pos:
                heads.append(f)
            else:
                alphas.append(f)
        elif isinstance(f, Top):
            if pos:
                return None
        elif isinstance(f, Bottom):
            if not pos:
                return None
        else:
            betas.append(f if not pos else neg(f))
    if len(heads) > 1:
        raise ShapeError("clause has two positive atoms over the quantified symbols")
    return HornClause(tuple(alphas), tuple(betas), heads[0] if heads else None)


def normalize_clauses(phi: Union[Formula, SoFormula], *,
                      symbols: str = "auto") -> SoFormula:
    """Put a relation-quantified formula into prefix plus clausal core.

    ``symbols`` picks which relation symbols the Horn condition is taken
    over: ``"all"`` for every quantified symbol, ``"exists"`` for the
    existentially quantified ones only (atoms over the others become side
    conditions, with signs adjusted), or ``"auto"`` to try both in that
    order.
    """
    sof = as_so_formula(phi)
    if isinstance(sof.body, ClausalCore):
        # already split; re-deriving would lose embedded side conditions
        return sof
    body = fold_constants(sof.body)
    if not binders_apart(body):
        body = rename_bound(body, FreshNames(_names_seed(body)))
    if symbols == "auto":
        try:
            return normalize_clauses(SoFormula(sof.prefix, body), symbols="all")
        except ShapeError:
            return normalize_clauses(SoFormula(sof.prefix, body), symbols="exists")
    if symbols == "all":
        clausal = frozenset(q.sym for q in sof.prefix)
    elif symbols == "exists":
        clausal = frozenset(q.sym for q in sof.prefix if q.q == EXISTS)
    else:
        raise ValueError(f"symbols must be auto, all or exists, not {symbols!r}")
    if isinstance(body, (Top, Bottom)):
        clauses = () if isinstance(body, Top) else (HornClause((), (), None),)
        return SoFormula(sof.prefix, ClausalCore((), clauses))
    uvars: list[str] = []
    raw: list[Formula] = []
    _collect_clause_formulas(body, uvars, raw)
    for f in raw:
        if not _so_free(f):
            raise ShapeError("relation quantifier nested below the clause level")
    clauses = []
    for f in raw:
        c = _decompose_clause(f, clausal)
        if c is not None:
            clauses.append(c)
    return SoFormula(sof.prefix, ClausalCore(tuple(uvars), tuple(clauses)))


def _so_free(phi: Formula) -> bool:
    match phi:
        case SoExists(_, _, _) | SoForall(_, _, _) | Lfp(_, _, _, _) | SLfp(_, _, _):
            return False
        case Not(b) | Forall(_, b) | Exists(_, b):
            return _so_free(b)
        case And(ps) | Or(ps):
            return all(_so_free(p) for p in ps)
        case Implies(l, r):
            return _so_free(l) and _so_free(r)
        case _:
            return True


def _names_seed(phi: Formula) -> set[str]:
    from .core import _all_names
    return _all_names(phi) | set(free_vars(phi))


GENERAL_SO = "general-so"
SO_HORN = "so-horn"
SO_HORN_STAR = "so-horn-star"
SO_HORN_R = "so-horn-r"
SO_HORN_STAR_R = "so-horn-star-r"
SO_EHORN = "so-ehorn"
SO_EHORN_R = "so-ehorn-r"
SO_HORN_S = "so-horn-s"
SIGMA11_NORMAL = "sigma11-normal"
PI11_NORMAL = "pi11-normal"


@dataclass(frozen=True, slots=True)
class FragmentTag:
    kind: str
    depth: int | None = None

    def __str__(self) -> str:
        return self.kind if self.depth is None else f"{self.kind}[{self.depth}]"


def _block_shape(phi: Formula) -> tuple[str, ...]:
    """Quantifier block pattern of a prenex first-order formula, or raise."""
    shape: list[str] = []
    while True:
        match phi:
            case Forall(_, b):
                if not shape or shape[-1] != FORALL:
                    shape.append(FORALL)
                phi = b
            case Exists(_, b):
                if not shape or shape[-1] != EXISTS:
                    shape.append(EXISTS)
                phi = b
            case _:
                if not is_quantifier_free(phi):
                    raise ShapeError("matrix is not quantifier-free")
                return tuple(shape)


def _beta_is_literal(b: Beta) -> bool:
    return not isinstance(b, SoEmbed) and is_literal(b)


def _stratified_depth(phi: Union[Formula, SoFormula]) -> int | None:
    """Nesting depth when the formula is stratified Horn, else None."""
    try:
        sof = normalize_clauses(phi, symbols="all")
    except ShapeError:
        return None
    depth = 1
    for cl in sof.core().clauses:
        if any(isinstance(a, UnivAtom) for a in cl.alphas):
            return None
        for b in cl.betas:
            if isinstance(b, SoEmbed):
                inner = _stratified_depth(b.formula)
                if inner is None:
                    return None
                depth = max(depth, inner + 1)
            elif not is_literal(b):
                return None
    return depth


def classify_fragment(phi: Union[Formula, SoFormula]) -> frozenset[FragmentTag]:
    """Every fragment the formula falls into, syntactically.

    The result always contains the unrestricted tag.  Horn membership is
    decided on the clausal normal form, so a formula written with its
    quantified atoms scattered across both sides of the implications
    still classifies by what the sign-normalized clauses look like.
    """
    sof = as_so_formula(phi)
    tags: set[FragmentTag] = {FragmentTag(GENERAL_SO)}
    expanded = sof.body.to_formula() if isinstance(sof.body, ClausalCore) else sof.body

    if _so_free(expanded):
        try:
            shape = _block_shape(expanded)
        except ShapeError:
            shape = None
        if shape is not None:
            # one quantifier block may be empty, so single-block shapes pass
            if all(q.q == EXISTS for q in sof.prefix) and shape in (
                    (), (FORALL,), (EXISTS,), (FORALL, EXISTS)):
                tags.add(FragmentTag(SIGMA11_NORMAL))
            if all(q.q == FORALL for q in sof.prefix) and shape in (
                    (), (EXISTS,), (FORALL,), (EXISTS, FORALL)):
                tags.add(FragmentTag(PI11_NORMAL))

    try:
        core = normalize_clauses(sof, symbols="all").core()
    except ShapeError:
        core = None
    if core is not None:
        embeds = any(isinstance(b, SoEmbed) for cl in core.clauses for b in cl.betas)
        if not embeds:
            univ = any(isinstance(a, UnivAtom) for cl in core.clauses for a in cl.alphas)
            nonlit = any(not _beta_is_literal(b) for cl in core.clauses for b in cl.betas)
            tags.add(FragmentTag(SO_HORN_STAR_R))
            if not univ:
                tags.add(FragmentTag(SO_HORN_STAR))
            if not nonlit:
                tags.add(FragmentTag(SO_HORN_R))
            if not univ and not nonlit:
                tags.add(FragmentTag(SO_HORN))
        depth = _stratified_depth(sof)
        if depth is not None:
            tags.add(FragmentTag(SO_HORN_S, depth))

    try:
        ecore = normalize_clauses(sof, symbols="exists").core()
    except ShapeError:
        ecore = None
    if ecore is not None:
        if all(_beta_is_literal(b) for cl in ecore.clauses for b in cl.betas):
            tags.add(FragmentTag(SO_EHORN_R))
            if not any(isinstance(a, UnivAtom) for cl in ecore.clauses for a in cl.alphas):
                tags.add(FragmentTag(SO_EHORN))

    return frozenset(tags)


def eval_so_bruteforce(phi: Union[Formula, SoFormula], struct: FiniteStructure,
                       env: dict[str, int] | None = None, *,
                       budget: int = 65536,
                       rel_env: dict[str, frozenset[tuple[int, ...]]] | None = None,
                       ) -> bool:
    """Model checking with relation quantifiers by subset enumeration.

    Every candidate relation counts one unit against the budget, across
    all quantifiers and re-entries, so runaway arities fail fast instead
    of hanging.  Candidate order is the bit-mask order over the
    lexicographically sorted tuple universe, smallest mask first.
    """
    if isinstance(phi, SoFormula):
        phi = phi.to_formula()
    env = dict(env) if env else {}
    rels: dict[str, frozenset[tuple[int, ...]]] = dict(rel_env) if rel_env else {}
    spent = 0
    _MISSING = object()

    def candidates(arity: int):
        nonlocal spent
        uni = list(itertools.product(range(struct.size), repeat=arity))
        for mask in range(2 ** len(uni)):
            spent += 1
            if spent > budget:
                raise BudgetExceeded(
                    f"relation quantifier enumeration passed {budget} candidates",
                    required=spent)
            yield frozenset(uni[i] for i in range(len(uni)) if mask >> i & 1)

    def ev(f: Formula) -> bool:
        if is_first_order(f):
            return eval_fo(f, struct, env, rels)
        match f:
            case SoExists(sym, arity, b):
                old = rels.get(sym, _MISSING)
                try:
                    for s in candidates(arity):
                        rels[sym] = s
                        if ev(b):
                            return True
                    return False
                finally:
                    if old is _MISSING:
                        rels.pop(sym, None)
                    else:
                        rels[sym] = old
            case SoForall(sym, arity, b):
                old = rels.get(sym, _MISSING)
                try:
                    for s in candidates(arity):
                        rels[sym] = s
                        if not ev(b):
                            return False
                    return True
                finally:
                    if old is _MISSING:
                        rels.pop(sym, None)
                    else:
                        rels[sym] = old
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
            case Lfp(_, _, _, _) | SLfp(_, _, _):
                return eval_fo(f, struct, env, rels)
        raise ShapeError(f"not a formula node: {f!r}")

    return ev(phi)
