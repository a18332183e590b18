"""Rule programs over finite structures.

A program is a set of rules ``head <- body`` whose head symbols (the
intentional ones) are disjoint from the structure's vocabulary (the
extensional ones).  Bodies mix positive atoms, extensional literals,
equalities, block-universal atoms, and opaque first-order side
conditions; which of these appear determines the program's variant.

Evaluation is by simultaneous stages: every round derives from the same
snapshot, and the snapshot only grows.  Rules do not have to be range
restricted; a head variable that the body leaves open ranges over the
whole domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union

from .core import FiniteStructure, VocabularySpec, eval_fo, eval_term
from .syntax import (
    Cst, Eq, Formula, Not, Rel, ShapeError, Term, UnivAtom, ValidationError, Var,
    free_vars, rel_symbols, term_vars,
)


@dataclass(frozen=True, slots=True)
class Cond:
    """An opaque first-order side condition inside a rule body."""

    formula: Formula


BodyItem = Union[Rel, Not, Eq, UnivAtom, Cond]


@dataclass(frozen=True, slots=True)
class DatalogRule:
    head: Rel
    body: tuple[BodyItem, ...] = ()


PLAIN = "plain"
STAR = "star"
R = "r"
STAR_R = "star-r"

_VARIANT_FEATURES = {PLAIN: frozenset(), STAR: frozenset({"cond"}),
                     R: frozenset({"univ"}), STAR_R: frozenset({"cond", "univ"})}


@dataclass(frozen=True, slots=True)
class DatalogProgram:
    """Rules over an extensional vocabulary.

    ``variant`` is a declared ceiling (one of plain, star, r, star-r);
    validation rejects programs that use features beyond it.  Leave it
    None to accept whatever the rules use.
    """

    vocab: VocabularySpec
    rules: tuple[DatalogRule, ...]
    variant: str | None = None

    def intentional(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rules:
            prev = out.setdefault(r.head.sym, len(r.head.args))
            if prev != len(r.head.args):
                raise ValidationError(
                    f"head symbol {r.head.sym} used with arities {prev} and {len(r.head.args)}")
        return out


@dataclass(frozen=True, slots=True)
class StratifiedProgram:
    """A chain of programs, each treating the previous results as given.

    Stratum k's vocabulary must be stratum k-1's vocabulary extended by
    stratum k-1's head symbols, so negation and side conditions in
    stratum k may mention everything defined strictly below it.
    """

    strata: tuple[DatalogProgram, ...]

    def __post_init__(self) -> None:
        if not self.strata:
            raise ValidationError("a stratified program needs at least one stratum")


@dataclass(frozen=True, slots=True)
class ProgramReport:
    variant: str
    intentional: tuple[tuple[str, int], ...]
    extensional: tuple[tuple[str, int], ...]
    rule_count: int
    zeroary_in_bodies: bool


@dataclass(frozen=True, slots=True)
class StageTrace:
    """Snapshots per round; the run stops when two in a row agree."""

    stages: tuple[Mapping[str, frozenset[tuple[int, ...]]], ...]

    @property
    def rounds(self) -> int:
        return len(self.stages) - 1

    def converged(self) -> bool:
        return len(self.stages) >= 2 and self.stages[-1] == self.stages[-2]

    def stage_count(self, sym: str) -> int:
        """Rounds until the symbol stops changing for good."""
        last = 0
        for s in range(1, len(self.stages)):
            if self.stages[s][sym] != self.stages[s - 1][sym]:
                last = s
        return last


def _body_vars(item: BodyItem) -> set[str]:
    match item:
        case Rel(_, args):
            return term_vars(args)
        case Eq(l, r):
            return term_vars((l, r))
        case Not(b):
            return _body_vars(b)
        case UnivAtom(uvars, _, args):
            return term_vars(args) - set(uvars)
        case Cond(f):
            return set(free_vars(f))
    raise ShapeError(f"bad body item {item!r}")


def rule_vars(rule: DatalogRule) -> set[str]:
    out = term_vars(rule.head.args)
    for item in rule.body:
        out |= _body_vars(item)
    return out


def validate_program(prog: DatalogProgram) -> ProgramReport:
    intent = prog.intentional()
    ext = prog.vocab.arity_map()
    for sym in intent:
        if sym in ext:
            raise ValidationError(f"{sym} is extensional and cannot head a rule")

    def check_atom(sym: str, args: tuple[Term, ...], where: str) -> None:
        if sym in intent:
            want = intent[sym]
        elif sym in ext:
            want = ext[sym]
        else:
            raise ValidationError(f"unknown relation symbol {sym} in {where}")
        if len(args) != want:
            raise ValidationError(f"{sym} used with arity {len(args)} in {where}, expected {want}")
        for t in args:
            if isinstance(t, Cst) and t.name not in prog.vocab.constants:
                raise ValidationError(f"unknown constant {t.name} in {where}")

    has_univ = False
    has_cond = False
    zeroary_in_bodies = False
    for rule in prog.rules:
        check_atom(rule.head.sym, rule.head.args, "a rule head")
        for item in rule.body:
            match item:
                case Rel(sym, args):
                    check_atom(sym, args, "a rule body")
                    if sym in intent and not args:
                        zeroary_in_bodies = True
                case Not(Rel(sym, args)):
                    check_atom(sym, args, "a negated body atom")
                    if sym in intent:
                        raise ValidationError(
                            f"negation of {sym} inside its own program; stratify instead")
                case Not(Eq(_, _)) | Eq(_, _):
                    pass
                case Not(_):
                    raise ValidationError("negation applies to atoms and equalities only")
                case UnivAtom(_, sym, args):
                    has_univ = True
                    check_atom(sym, args, "a universal body atom")
                case Cond(f):
                    has_cond = True
                    bad = rel_symbols(f) - set(ext)
                    if bad & set(intent):
                        raise ValidationError(
                            f"side condition mentions intentional symbols {sorted(bad & set(intent))}")
                    if bad:
                        raise ValidationError(f"side condition mentions unknown symbols {sorted(bad)}")
                case _:
                    raise ShapeError(f"bad body item {item!r}")
    if has_univ and has_cond:
        variant = STAR_R
    elif has_univ:
        variant = R
    elif has_cond:
        variant = STAR
    else:
        variant = PLAIN
    if prog.variant is not None:
        if prog.variant not in _VARIANT_FEATURES:
            raise ValidationError(f"unknown variant {prog.variant!r}")
        if not _VARIANT_FEATURES[variant] <= _VARIANT_FEATURES[prog.variant]:
            raise ValidationError(
                f"program declared {prog.variant} but its rules need {variant}")
    return ProgramReport(
        variant=variant,
        intentional=tuple(sorted(intent.items())),
        extensional=tuple(sorted(ext.items())),
        rule_count=len(prog.rules),
        zeroary_in_bodies=zeroary_in_bodies,
    )


def result_vocab(prog: DatalogProgram) -> VocabularySpec:
    intent = prog.intentional()
    return prog.vocab.extend(sorted(intent.items()))


Lookup = Callable[[str], frozenset[tuple[int, ...]]]


def _try_extend(binding: dict[str, int], args: tuple[Term, ...],
                tup: tuple[int, ...], consts: Mapping[str, int]) -> dict[str, int] | None:
    out = binding
    copied = False
    for t, val in zip(args, tup):
        if isinstance(t, Cst):
            if consts[t.name] != val:
                return None
        elif t.name in out:
            if out[t.name] != val:
                return None
        else:
            if not copied:
                out = dict(out)
                copied = True
            out[t.name] = val
    return out if copied or out is not binding else dict(out)


def _filter_ok(item: BodyItem, env: dict[str, int], struct: FiniteStructure,
               lookup: Lookup) -> bool:
    match item:
        case Eq(l, r):
            return eval_term(l, struct, env) == eval_term(r, struct, env)
        case Not(Eq(l, r)):
            return eval_term(l, struct, env) != eval_term(r, struct, env)
        case Not(Rel(sym, args)):
            return tuple(eval_term(t, struct, env) for t in args) not in lookup(sym)
        case UnivAtom(uvars, sym, args):
            rel = lookup(sym)
            tail = tuple(eval_term(t, struct, env) for t in args[len(uvars):])
            for combo in itertools.product(range(struct.size), repeat=len(uvars)):
                if combo + tail not in rel:
                    return False
            return True
        case Cond(f):
            scoped = {v: env[v] for v in free_vars(f) if v in env}
            return eval_fo(f, struct, scoped, dict((s, lookup(s)) for s in rel_symbols(f)))
    raise ShapeError(f"bad body item {item!r}")


def _match_rule(rule: DatalogRule, struct: FiniteStructure, lookup: Lookup,
                delta_at: int | None = None,
                delta: Mapping[str, frozenset[tuple[int, ...]]] | None = None,
                ) -> Iterator[tuple[int, ...]]:
    """Head tuples derivable in one step.

    With ``delta_at`` set, the positive atom at that body index draws
    from ``delta`` instead of the full snapshot.
    """
    positives = [(i, it) for i, it in enumerate(rule.body) if isinstance(it, Rel)]
    filters = [it for it in rule.body if not isinstance(it, Rel)]
    bindings: list[dict[str, int]] = [{}]
    for i, atom in positives:
        if delta_at is not None and i == delta_at:
            rel = delta.get(atom.sym, frozenset()) if delta else frozenset()
        else:
            rel = lookup(atom.sym)
        nxt: list[dict[str, int]] = []
        for b in bindings:
            for tup in rel:
                e = _try_extend(b, atom.args, tup, struct.constants)
                if e is not None:
                    nxt.append(e)
        bindings = nxt
        if not bindings:
            return
    needed = sorted(rule_vars(rule))
    for b in bindings:
        missing = [v for v in needed if v not in b]
        for combo in itertools.product(range(struct.size), repeat=len(missing)):
            env = dict(b)
            env.update(zip(missing, combo))
            if all(_filter_ok(f, env, struct, lookup) for f in filters):
                yield tuple(eval_term(t, struct, env) for t in rule.head.args)


def _rule_class(rule: DatalogRule, intent: Mapping[str, int]) -> str:
    """How the incremental engine treats the rule between rounds."""
    has_int_pos = any(isinstance(it, Rel) and it.sym in intent for it in rule.body)
    has_int_univ = any(isinstance(it, UnivAtom) and it.sym in intent for it in rule.body)
    if has_int_univ:
        return "refire"
    if has_int_pos:
        return "delta"
    return "once"


def eval_datalog(prog: DatalogProgram, struct: FiniteStructure, *,
                 trace: bool = False, engine: str = "naive",
                 ) -> FiniteStructure | tuple[FiniteStructure, StageTrace]:
    """Run the program to its fixed point on the structure.

    Returns the structure extended by the intentional relations; with
    ``trace=True`` also the full stage sequence.  ``engine`` picks
    between full re-derivation per round ("naive") and incremental
    derivation ("seminaive"); both produce identical stage snapshots.
    """
    if engine not in ("naive", "seminaive"):
        raise ValueError(f"unknown engine {engine!r}")
    validate_program(prog)
    intent = prog.intentional()
    current: dict[str, frozenset[tuple[int, ...]]] = {s: frozenset() for s in intent}

    def lookup(sym: str) -> frozenset[tuple[int, ...]]:
        if sym in current:
            return current[sym]
        return struct.relation(sym)

    stages = [dict(current)]
    classes = {id(r): _rule_class(r, intent) for r in prog.rules}
    delta: dict[str, frozenset[tuple[int, ...]]] = {}
    round_no = 0
    while True:
        round_no += 1
        derived: dict[str, set[tuple[int, ...]]] = {s: set() for s in intent}
        for rule in prog.rules:
            if engine == "naive":
                derived[rule.head.sym].update(_match_rule(rule, struct, lookup))
                continue
            cls = classes[id(rule)]
            if cls == "once":
                if round_no == 1:
                    derived[rule.head.sym].update(_match_rule(rule, struct, lookup))
            elif cls == "refire":
                derived[rule.head.sym].update(_match_rule(rule, struct, lookup))
            else:
                if round_no == 1:
                    derived[rule.head.sym].update(_match_rule(rule, struct, lookup))
                else:
                    for i, it in enumerate(rule.body):
                        if isinstance(it, Rel) and it.sym in intent:
                            derived[rule.head.sym].update(
                                _match_rule(rule, struct, lookup, delta_at=i, delta=delta))
        nxt = {s: current[s] | frozenset(derived[s]) for s in intent}
        stages.append(dict(nxt))
        if nxt == current:
            break
        delta = {s: nxt[s] - current[s] for s in intent}
        current = nxt
    out = struct.with_relations(current, vocab=result_vocab(prog))
    if trace:
        return out, StageTrace(tuple(stages))
    return out


def eval_stratified(sp: StratifiedProgram, struct: FiniteStructure, *,
                    trace: bool = False, engine: str = "naive",
                    ) -> FiniteStructure | tuple[FiniteStructure, tuple[StageTrace, ...]]:
    """Run the strata bottom up, feeding each result to the next as given facts.

    The structure may interpret more symbols than stratum 0 mentions;
    the extras are dropped so the chain's vocabulary bookkeeping holds.
    """
    traces = []
    cur = struct
    if sp.strata[0].vocab != struct.vocab:
        base = sp.strata[0].vocab
        have = struct.vocab.arity_map()
        for sym, ar in base.relations:
            if have.get(sym) != ar:
                raise ValidationError(f"structure does not interpret {sym}/{ar}")
        for c in base.constants:
            if c not in struct.constants:
                raise ValidationError(f"structure does not interpret constant {c}")
        cur = FiniteStructure(base, struct.size,
                              {sym: struct.relation(sym) for sym, _ in base.relations},
                              {c: struct.constants[c] for c in base.constants})
    for k, prog in enumerate(sp.strata):
        if prog.vocab != cur.vocab:
            raise ValidationError(
                f"stratum {k} expects vocabulary {prog.vocab}, structure has {cur.vocab}")
        if trace:
            cur, t = eval_datalog(prog, cur, trace=True, engine=engine)
            traces.append(t)
        else:
            cur = eval_datalog(prog, cur, engine=engine)
    if trace:
        return cur, tuple(traces)
    return cur


@dataclass(frozen=True, slots=True)
class DatalogQuery:
    """A program with a distinguished goal symbol to read off at the end."""

    program: DatalogProgram
    goal: str

    def run(self, struct: FiniteStructure, *, engine: str = "naive",
            ) -> frozenset[tuple[int, ...]]:
        result = eval_datalog(self.program, struct, engine=engine)
        return result.relation(self.goal)

    def holds(self, struct: FiniteStructure, point: tuple[int, ...] = (), *,
              engine: str = "naive") -> bool:
        return point in self.run(struct, engine=engine)


@dataclass(frozen=True, slots=True)
class StratifiedQuery:
    program: StratifiedProgram
    goal: str

    def run(self, struct: FiniteStructure, *, engine: str = "naive",
            ) -> frozenset[tuple[int, ...]]:
        result = eval_stratified(self.program, struct, engine=engine)
        return result.relation(self.goal)

    def holds(self, struct: FiniteStructure, point: tuple[int, ...] = (), *,
              engine: str = "naive") -> bool:
        return point in self.run(struct, engine=engine)


def stage_bound(prog: DatalogProgram, size: int) -> int:
    """Every run on a structure of this size stabilizes within this many rounds."""
    return 1 + sum(size ** arity for _, arity in prog.intentional().items())


def normalize_zeroary(prog: DatalogProgram, fresh_hint: str = "nz") -> DatalogProgram:
    """Rewrite so no intentional zero-ary symbol occurs in a body.

    Each zero-ary symbol that bodies test gets a unary shadow derived by
    the same rules; testing the shadow at a free variable is the same
    test, one round for one round.
    """
    intent = prog.intentional()
    tested = {it.sym for r in prog.rules for it in r.body
              if isinstance(it, Rel) and it.sym in intent and not it.args}
    if not tested:
        return prog
    taken = set(intent) | {s for s, _ in prog.vocab.relations} | set(prog.vocab.constants)
    shadow: dict[str, str] = {}
    for sym in sorted(tested):
        cand = f"{sym}_{fresh_hint}"
        while cand in taken:
            cand = cand + "_"
        taken.add(cand)
        shadow[sym] = cand
    used_vars = {v for r in prog.rules for v in rule_vars(r)}
    wit = "w"
    while wit in used_vars:
        wit = "_" + wit
    new_rules: list[DatalogRule] = []
    for rule in prog.rules:
        body = tuple(Rel(shadow[it.sym], (Var(wit),))
                     if isinstance(it, Rel) and it.sym in shadow and not it.args else it
                     for it in rule.body)
        new_rules.append(DatalogRule(rule.head, body))
        if rule.head.sym in shadow and not rule.head.args:
            new_rules.append(DatalogRule(Rel(shadow[rule.head.sym], (Var(wit),)), body))
    return DatalogProgram(prog.vocab, tuple(new_rules), prog.variant)
