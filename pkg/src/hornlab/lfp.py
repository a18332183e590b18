"""Fixed-point formulas: positivity, evaluation, staging."""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

from .core import FiniteStructure, eval_fo, fixpoint_sets
from .syntax import (
    And, Bottom, Eq, Exists, Forall, Formula, Implies, Lfp, Not, Or, PositivityError,
    Rel, SLfp, SLfpComp, ShapeError, SoExists, SoForall, Top,
)


def positivity_violations(phi: Formula) -> list[str]:
    """Places where a fixed-point bound symbol occurs under negation.

    The walk tracks, for every symbol bound by an enclosing fixed-point
    operator, whether the current position has even negation depth
    relative to that binder.  Implication antecedents count as one
    negation.
    """
    out: list[str] = []

    def walk(f: Formula, watch: dict[str, bool]) -> None:
        match f:
            case Rel(sym, _):
                if sym in watch and not watch[sym]:
                    out.append(f"{sym} occurs negatively in its fixed-point body")
            case Eq(_, _) | Top() | Bottom():
                pass
            case Not(b):
                walk(b, {s: not v for s, v in watch.items()})
            case And(ps) | Or(ps):
                for p in ps:
                    walk(p, watch)
            case Implies(l, r):
                walk(l, {s: not v for s, v in watch.items()})
                walk(r, watch)
            case Forall(_, b) | Exists(_, b) | SoExists(_, _, b) | SoForall(_, _, b):
                walk(b, watch)
            case Lfp(rvar, _, b, _):
                walk(b, {**watch, rvar: True})
            case SLfp(comps, _, _):
                inner = {**watch, **{c.rvar: True for c in comps}}
                for c in comps:
                    walk(c.body, inner)
            case _:
                raise ShapeError(f"not a formula node: {f!r}")

    walk(phi, {})
    return out


def require_positive(phi: Formula) -> None:
    bad = positivity_violations(phi)
    if bad:
        raise PositivityError("; ".join(bad))


def eval_lfp(phi: Formula, struct: FiniteStructure,
             env: dict[str, int] | None = None) -> bool:
    """Evaluate a fixed-point formula after checking positivity."""
    require_positive(phi)
    return eval_fo(phi, struct, dict(env) if env else {})


def lfp_stages(phi: Lfp | SLfp, struct: FiniteStructure,
               env: Mapping[str, int] | None = None,
               ) -> list[dict[str, frozenset[tuple[int, ...]]]]:
    """Snapshot sequence of the simultaneous iteration, empty set first.

    The last two entries agree; their shared value is the fixed point.
    """
    if isinstance(phi, Lfp):
        comps = ((phi.rvar, phi.vars, phi.body),)
    else:
        comps = tuple((c.rvar, c.vars, c.body) for c in phi.comps)
    base = dict(env) if env else {}
    names = [r for r, _, _ in comps]
    current = {r: frozenset() for r in names}
    stages = [dict(current)]
    cap = 2 + sum(struct.size ** len(vs) for _, vs, _ in comps)
    for _ in range(cap):
        nxt: dict[str, frozenset[tuple[int, ...]]] = {}
        for rvar, vs, body in comps:
            hits = []
            for tup in itertools.product(range(struct.size), repeat=len(vs)):
                scope = dict(base)
                scope.update(zip(vs, tup))
                if eval_fo(body, struct, scope, current):
                    hits.append(tup)
            nxt[rvar] = frozenset(hits)
        stages.append(dict(nxt))
        if nxt == current:
            return stages
        current = nxt
    raise PositivityError("fixed-point iteration did not converge; check positivity")


def slfp_to_lfp(phi: SLfp) -> Lfp:
    """Collapse a one-component simultaneous fixed point to the plain operator."""
    if len(phi.comps) != 1:
        raise ShapeError(
            f"{len(phi.comps)} components; only single-component systems collapse directly")
    comp = phi.comps[0]
    if phi.goal != comp.rvar:
        raise ShapeError(f"goal {phi.goal} does not name the single component {comp.rvar}")
    return Lfp(comp.rvar, comp.vars, comp.body, phi.args)


def lfp_fixpoint(phi: Lfp | SLfp, struct: FiniteStructure,
                 env: Mapping[str, int] | None = None,
                 ) -> dict[str, frozenset[tuple[int, ...]]]:
    """The stable relations themselves, keyed by component name."""
    if isinstance(phi, Lfp):
        comps = ((phi.rvar, phi.vars, phi.body),)
    else:
        comps = tuple((c.rvar, c.vars, c.body) for c in phi.comps)
    return fixpoint_sets(comps, struct, dict(env) if env else {})
