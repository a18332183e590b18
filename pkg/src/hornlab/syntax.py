"""Shared formula syntax.

Every evaluator and transform in the package works on the node types
defined here: terms, first-order connectives and quantifiers, relation
quantifiers (which make a formula second-order), and fixed-point
operators.  Nodes are immutable and compare by value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class HornlabError(Exception):
    """Base class for every error raised by this package."""


class ArityMismatch(HornlabError):
    pass


class UnboundVariable(HornlabError):
    pass


class ShapeError(HornlabError):
    """Input does not have the syntactic shape an operation requires."""


class ValidationError(HornlabError):
    pass


class PositivityError(HornlabError):
    pass


class ParseError(HornlabError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        if line is not None:
            message = f"line {line}: {message}" if col is None else f"line {line}, col {col}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


class BudgetExceeded(HornlabError):
    """An enumeration or rewriting step would exceed its configured budget."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, slots=True)
class Cst:
    name: str

    def __repr__(self) -> str:
        return f"Cst({self.name!r})"


Term = Union[Var, Cst]


@dataclass(frozen=True, slots=True)
class Rel:
    sym: str
    args: tuple[Term, ...] = ()

    def __repr__(self) -> str:
        return f"Rel({self.sym!r}, {self.args!r})"


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class Bottom:
    pass


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True, slots=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True, slots=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True, slots=True)
class SoExists:
    """Existential quantifier over a relation symbol."""

    sym: str
    arity: int
    body: "Formula"


@dataclass(frozen=True, slots=True)
class SoForall:
    """Universal quantifier over a relation symbol."""

    sym: str
    arity: int
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Lfp:
    """Least fixed point of ``body`` seen as an operator on ``rvar``.

    ``vars`` are the tuple positions of ``rvar``; any other free variable
    of ``body`` is a parameter.  The node denotes membership of ``args``
    in the fixed point.
    """

    rvar: str
    vars: tuple[str, ...]
    body: "Formula"
    args: tuple[Term, ...]


@dataclass(frozen=True, slots=True)
class SLfpComp:
    rvar: str
    vars: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True, slots=True)
class SLfp:
    """Simultaneous least fixed point; ``goal`` names the queried component."""

    comps: tuple[SLfpComp, ...]
    goal: str
    args: tuple[Term, ...]


Formula = Union[
    Rel, Eq, Top, Bottom, Not, And, Or, Implies, Forall, Exists,
    SoExists, SoForall, Lfp, SLfp,
]


@dataclass(frozen=True, slots=True)
class UnivAtom:
    """A block-universal atom: all of ``uvars``, then the atom.

    The universally bound variables must be pairwise distinct and fill
    exactly the leading argument positions.  Only clause bodies and rule
    bodies may contain these.
    """

    uvars: tuple[str, ...]
    sym: str
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(set(self.uvars)) != len(self.uvars):
            raise ShapeError(f"repeated bound variable in universal atom over {self.sym}")
        lead = self.args[: len(self.uvars)]
        if lead != tuple(Var(u) for u in self.uvars):
            raise ShapeError(
                f"universal atom over {self.sym}: bound variables must fill the leading positions"
            )
        rest_vars = {t.name for t in self.args[len(self.uvars):] if isinstance(t, Var)}
        if rest_vars & set(self.uvars):
            raise ShapeError(
                f"universal atom over {self.sym}: bound variable reused in a trailing position"
            )


def univ_atom(uvars: Iterable[str], sym: str, args: Iterable[Term]) -> Rel | UnivAtom:
    """Build a universal atom, degrading to a plain atom when no variable is bound."""
    uvars = tuple(uvars)
    args = tuple(args)
    if not uvars:
        return Rel(sym, args)
    return UnivAtom(uvars, sym, args)


def conj(parts: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        elif isinstance(p, Top):
            continue
        elif isinstance(p, Bottom):
            return Bottom()
        else:
            flat.append(p)
    if not flat:
        return Top()
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(parts: Iterable[Formula]) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.parts)
        elif isinstance(p, Bottom):
            continue
        elif isinstance(p, Top):
            return Top()
        else:
            flat.append(p)
    if not flat:
        return Bottom()
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def neg(phi: Formula) -> Formula:
    if isinstance(phi, Not):
        return phi.body
    if isinstance(phi, Top):
        return Bottom()
    if isinstance(phi, Bottom):
        return Top()
    return Not(phi)


def forall_block(vars: Iterable[str], body: Formula) -> Formula:
    out = body
    for v in reversed(tuple(vars)):
        out = Forall(v, out)
    return out


def exists_block(vars: Iterable[str], body: Formula) -> Formula:
    out = body
    for v in reversed(tuple(vars)):
        out = Exists(v, out)
    return out


def tuple_eq(lhs: Iterable[Term], rhs: Iterable[Term]) -> Formula:
    lhs = tuple(lhs)
    rhs = tuple(rhs)
    if len(lhs) != len(rhs):
        raise ArityMismatch("tuple equality over tuples of different lengths")
    return conj(Eq(a, b) for a, b in zip(lhs, rhs))


def term_vars(terms: Iterable[Term]) -> set[str]:
    return {t.name for t in terms if isinstance(t, Var)}


def term_constants(terms: Iterable[Term]) -> set[str]:
    return {t.name for t in terms if isinstance(t, Cst)}


def free_vars(phi: Formula) -> frozenset[str]:
    match phi:
        case Rel(_, args):
            return frozenset(term_vars(args))
        case Eq(l, r):
            return frozenset(term_vars((l, r)))
        case Top() | Bottom():
            return frozenset()
        case Not(b):
            return free_vars(b)
        case And(ps) | Or(ps):
            out: frozenset[str] = frozenset()
            for p in ps:
                out |= free_vars(p)
            return out
        case Implies(l, r):
            return free_vars(l) | free_vars(r)
        case Forall(v, b) | Exists(v, b):
            return free_vars(b) - {v}
        case SoExists(_, _, b) | SoForall(_, _, b):
            return free_vars(b)
        case Lfp(_, vs, b, args):
            return (free_vars(b) - set(vs)) | frozenset(term_vars(args))
        case SLfp(comps, _, args):
            out = frozenset(term_vars(args))
            for c in comps:
                out |= free_vars(c.body) - set(c.vars)
            return out
    raise ShapeError(f"not a formula node: {phi!r}")


def constants_of(phi: Formula) -> frozenset[str]:
    match phi:
        case Rel(_, args):
            return frozenset(term_constants(args))
        case Eq(l, r):
            return frozenset(term_constants((l, r)))
        case Top() | Bottom():
            return frozenset()
        case Not(b):
            return constants_of(b)
        case And(ps) | Or(ps):
            out: frozenset[str] = frozenset()
            for p in ps:
                out |= constants_of(p)
            return out
        case Implies(l, r):
            return constants_of(l) | constants_of(r)
        case Forall(_, b) | Exists(_, b):
            return constants_of(b)
        case SoExists(_, _, b) | SoForall(_, _, b):
            return constants_of(b)
        case Lfp(_, _, b, args):
            return constants_of(b) | frozenset(term_constants(args))
        case SLfp(comps, _, args):
            out = frozenset(term_constants(args))
            for c in comps:
                out |= constants_of(c.body)
            return out
    raise ShapeError(f"not a formula node: {phi!r}")


def rel_symbols(phi: Formula) -> frozenset[str]:
    """Every relation symbol used or bound anywhere in the formula."""
    match phi:
        case Rel(sym, _):
            return frozenset((sym,))
        case Eq(_, _) | Top() | Bottom():
            return frozenset()
        case Not(b):
            return rel_symbols(b)
        case And(ps) | Or(ps):
            out: frozenset[str] = frozenset()
            for p in ps:
                out |= rel_symbols(p)
            return out
        case Implies(l, r):
            return rel_symbols(l) | rel_symbols(r)
        case Forall(_, b) | Exists(_, b):
            return rel_symbols(b)
        case SoExists(sym, _, b) | SoForall(sym, _, b):
            return rel_symbols(b) | {sym}
        case Lfp(rvar, _, b, _):
            return rel_symbols(b) | {rvar}
        case SLfp(comps, goal, _):
            out = frozenset((goal,))
            for c in comps:
                out |= rel_symbols(c.body) | {c.rvar}
            return out
    raise ShapeError(f"not a formula node: {phi!r}")


def is_first_order(phi: Formula) -> bool:
    """True when the formula contains no relation quantifier and no fixed point."""
    match phi:
        case Rel(_, _) | Eq(_, _) | Top() | Bottom():
            return True
        case Not(b) | Forall(_, b) | Exists(_, b):
            return is_first_order(b)
        case And(ps) | Or(ps):
            return all(is_first_order(p) for p in ps)
        case Implies(l, r):
            return is_first_order(l) and is_first_order(r)
        case _:
            return False


def is_quantifier_free(phi: Formula) -> bool:
    match phi:
        case Rel(_, _) | Eq(_, _) | Top() | Bottom():
            return True
        case Not(b):
            return is_quantifier_free(b)
        case And(ps) | Or(ps):
            return all(is_quantifier_free(p) for p in ps)
        case Implies(l, r):
            return is_quantifier_free(l) and is_quantifier_free(r)
        case _:
            return False


def quantifier_rank(phi: Formula) -> int:
    match phi:
        case Rel(_, _) | Eq(_, _) | Top() | Bottom():
            return 0
        case Not(b):
            return quantifier_rank(b)
        case And(ps) | Or(ps):
            return max((quantifier_rank(p) for p in ps), default=0)
        case Implies(l, r):
            return max(quantifier_rank(l), quantifier_rank(r))
        case Forall(_, b) | Exists(_, b):
            return 1 + quantifier_rank(b)
        case SoExists(_, _, b) | SoForall(_, _, b):
            return quantifier_rank(b)
    raise ShapeError(f"quantifier rank undefined for {phi!r}")


def _subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var) and t.name in mapping:
        return mapping[t.name]
    return t


def subst_vars(phi: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Substitute terms for free variables.  Binders shadow their variable.

    Callers are expected to use fresh bound names; the substitution does
    not rename binders to avoid capture.
    """
    if not mapping:
        return phi
    match phi:
        case Rel(sym, args):
            return Rel(sym, tuple(_subst_term(t, mapping) for t in args))
        case Eq(l, r):
            return Eq(_subst_term(l, mapping), _subst_term(r, mapping))
        case Top() | Bottom():
            return phi
        case Not(b):
            return Not(subst_vars(b, mapping))
        case And(ps):
            return And(tuple(subst_vars(p, mapping) for p in ps))
        case Or(ps):
            return Or(tuple(subst_vars(p, mapping) for p in ps))
        case Implies(l, r):
            return Implies(subst_vars(l, mapping), subst_vars(r, mapping))
        case Forall(v, b):
            inner = {k: t for k, t in mapping.items() if k != v}
            return Forall(v, subst_vars(b, inner))
        case Exists(v, b):
            inner = {k: t for k, t in mapping.items() if k != v}
            return Exists(v, subst_vars(b, inner))
        case SoExists(sym, a, b):
            return SoExists(sym, a, subst_vars(b, mapping))
        case SoForall(sym, a, b):
            return SoForall(sym, a, subst_vars(b, mapping))
        case Lfp(rvar, vs, b, args):
            inner = {k: t for k, t in mapping.items() if k not in vs}
            return Lfp(rvar, vs, subst_vars(b, inner),
                       tuple(_subst_term(t, mapping) for t in args))
        case SLfp(comps, goal, args):
            new_comps = []
            for c in comps:
                inner = {k: t for k, t in mapping.items() if k not in c.vars}
                new_comps.append(SLfpComp(c.rvar, c.vars, subst_vars(c.body, inner)))
            return SLfp(tuple(new_comps), goal,
                        tuple(_subst_term(t, mapping) for t in args))
    raise ShapeError(f"not a formula node: {phi!r}")


def map_rel_atoms(phi: Formula, sym: str, fn) -> Formula:
    """Replace every atom over ``sym`` by ``fn(args)``.

    Stops descending where ``sym`` is rebound by a relation quantifier or
    fixed-point operator.
    """
    match phi:
        case Rel(s, args):
            return fn(args) if s == sym else phi
        case Eq(_, _) | Top() | Bottom():
            return phi
        case Not(b):
            return Not(map_rel_atoms(b, sym, fn))
        case And(ps):
            return And(tuple(map_rel_atoms(p, sym, fn) for p in ps))
        case Or(ps):
            return Or(tuple(map_rel_atoms(p, sym, fn) for p in ps))
        case Implies(l, r):
            return Implies(map_rel_atoms(l, sym, fn), map_rel_atoms(r, sym, fn))
        case Forall(v, b):
            return Forall(v, map_rel_atoms(b, sym, fn))
        case Exists(v, b):
            return Exists(v, map_rel_atoms(b, sym, fn))
        case SoExists(s, a, b):
            return phi if s == sym else SoExists(s, a, map_rel_atoms(b, sym, fn))
        case SoForall(s, a, b):
            return phi if s == sym else SoForall(s, a, map_rel_atoms(b, sym, fn))
        case Lfp(rvar, vs, b, args):
            if rvar == sym:
                return phi
            return Lfp(rvar, vs, map_rel_atoms(b, sym, fn), args)
        case SLfp(comps, goal, args):
            if any(c.rvar == sym for c in comps):
                return phi
            return SLfp(tuple(SLfpComp(c.rvar, c.vars, map_rel_atoms(c.body, sym, fn))
                              for c in comps), goal, args)
    raise ShapeError(f"not a formula node: {phi!r}")


def rename_bound(phi: Formula, fresh: "FreshNames") -> Formula:
    """Give every individually bound variable a fresh name.

    After this, no two binders share a name and no binder shadows a free
    variable, so capture-unaware substitution is safe.
    """

    def walk(f: Formula, env: Mapping[str, Term]) -> Formula:
        match f:
            case Rel(sym, args):
                return Rel(sym, tuple(_subst_term(t, env) for t in args))
            case Eq(l, r):
                return Eq(_subst_term(l, env), _subst_term(r, env))
            case Top() | Bottom():
                return f
            case Not(b):
                return Not(walk(b, env))
            case And(ps):
                return And(tuple(walk(p, env) for p in ps))
            case Or(ps):
                return Or(tuple(walk(p, env) for p in ps))
            case Implies(l, r):
                return Implies(walk(l, env), walk(r, env))
            case Forall(v, b):
                nv = fresh.var(_hint(v))
                return Forall(nv, walk(b, {**env, v: Var(nv)}))
            case Exists(v, b):
                nv = fresh.var(_hint(v))
                return Exists(nv, walk(b, {**env, v: Var(nv)}))
            case SoExists(sym, a, b):
                return SoExists(sym, a, walk(b, env))
            case SoForall(sym, a, b):
                return SoForall(sym, a, walk(b, env))
            case Lfp(rvar, vs, b, args):
                nvs = tuple(fresh.var(_hint(v)) for v in vs)
                inner = {**env, **{v: Var(nv) for v, nv in zip(vs, nvs)}}
                return Lfp(rvar, nvs, walk(b, inner),
                           tuple(_subst_term(t, env) for t in args))
            case SLfp(comps, goal, args):
                new_comps = []
                for c in comps:
                    nvs = tuple(fresh.var(_hint(v)) for v in c.vars)
                    inner = {**env, **{v: Var(nv) for v, nv in zip(c.vars, nvs)}}
                    new_comps.append(SLfpComp(c.rvar, nvs, walk(c.body, inner)))
                return SLfp(tuple(new_comps), goal,
                            tuple(_subst_term(t, env) for t in args))
        raise ShapeError(f"not a formula node: {f!r}")

    return walk(phi, {})


def _hint(name: str) -> str:
    base = name.lstrip("_").rstrip("0123456789'")
    return base if base else "v"


class FreshNames:
    """Fresh identifier factory.

    Generated names carry the reserved ``_`` prefix and a counter that
    only moves forward, so one factory never hands out the same name
    twice and never collides with the names it was seeded with.
    """

    def __init__(self, used: Iterable[str] = ()):
        self._used = set(used)
        self._n = 0

    def _next(self, hint: str) -> str:
        while True:
            self._n += 1
            name = f"_{hint}{self._n}"
            if name not in self._used:
                self._used.add(name)
                return name

    def var(self, hint: str = "v") -> str:
        return self._next(hint)

    def vars(self, count: int, hint: str = "v") -> tuple[str, ...]:
        return tuple(self._next(hint) for _ in range(count))

    def rel(self, hint: str = "R") -> str:
        return self._next(hint)

    def reserve(self, names: Iterable[str]) -> None:
        self._used.update(names)
