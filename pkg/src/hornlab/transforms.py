"""Rewrites between the logics this package handles.

Each function takes an artifact in one formalism and produces one in
another, together with a report saying which rewrite ran, which symbols
it invented, and how the output answers relate to the input's: either
the same relation ("equivalent") or its complement ("complement").
Rewrites validate the shape they need and raise ShapeError otherwise;
they never silently accept inputs outside their fragment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

from .core import (
    VocabularySpec, fold_constants, is_literal, to_cnf_matrix, to_prenex_dnf,
    _all_names, _nnf_literal_neg,
)
from .datalog import (
    Cond, DatalogProgram, DatalogQuery, DatalogRule, StratifiedProgram,
    StratifiedQuery, normalize_zeroary, rule_vars, validate_program,
)
from .lfp import require_positive, slfp_to_lfp
from .second_order import (
    EXISTS, FORALL, ClausalCore, FragmentTag, HornClause, SO_HORN_STAR_R, SoEmbed,
    SoFormula, SoQuant, as_so_formula, binders_apart, classify_fragment,
    normalize_clauses,
)
from .syntax import (
    And, ArityMismatch, Bottom, Eq, Exists, Forall, Formula, FreshNames,
    Implies, Lfp, Not, Or, Rel, SLfp, SLfpComp, ShapeError, SoExists, Term, Top,
    UnivAtom, ValidationError, Var, conj, disj, exists_block, forall_block,
    free_vars, is_first_order, map_rel_atoms, neg, rel_symbols, rename_bound,
    subst_vars, term_vars, tuple_eq,
)


@dataclass(frozen=True, slots=True)
class TransformReport:
    rule: str
    contract: str  # "equivalent" or "complement"
    fresh_symbols: tuple[str, ...] = ()
    steps: tuple[str, ...] = ()
    fragment: str | None = None
    query_vars: tuple[str, ...] | None = None


def _fresh_rel(used: set[str], base: str) -> str:
    base = base or "R"
    for primes in range(1, 4):
        cand = base + "'" * primes
        if cand not in used:
            used.add(cand)
            return cand
    n = 2
    while f"{base}_{n}" in used:
        n += 1
    used.add(f"{base}_{n}")
    return f"{base}_{n}"


def _fresh_var_seq(used: set[str], hint: str, count: int) -> tuple[str, ...]:
    out: list[str] = []
    n = 0
    while len(out) < count:
        n += 1
        cand = f"{hint}{n}"
        if cand in used:
            cand = f"_{hint}{n}"
            while cand in used:
                cand = "_" + cand
        used.add(cand)
        out.append(cand)
    return tuple(out)


def _bound_names(phi: Formula) -> set[str]:
    return _all_names(phi) - set(free_vars(phi))


def _pinned_term(lit: Formula, v: str) -> Term | None:
    match lit:
        case Eq(Var(name), t) if name == v and v not in term_vars((t,)):
            return t
        case Eq(t, Var(name)) if name == v and v not in term_vars((t,)):
            return t
    return None


def _one_point(phi: Formula) -> Formula:
    """Substitute away existentials pinned by an equality conjunct.

    Exists x (x = t & rest) becomes rest[x := t].  A whole existential
    block is scanned at once, so pins of outer variables buried under
    inner quantifiers are found too.  An equation is kept when
    substituting t could capture it under a binder inside rest.
    """
    match phi:
        case Not(b):
            return Not(_one_point(b))
        case And(parts):
            return And(tuple(_one_point(p) for p in parts))
        case Or(parts):
            return Or(tuple(_one_point(p) for p in parts))
        case Implies(l, r):
            return Implies(_one_point(l), _one_point(r))
        case Forall(v, b):
            return Forall(v, _one_point(b))
        case Exists(_, _):
            vs: list[str] = []
            node = phi
            while isinstance(node, Exists):
                vs.append(node.var)
                node = node.body
            core = _one_point(node)
            parts = list(core.parts) if isinstance(core, And) else [core]
            changed = True
            while changed:
                changed = False
                for v in tuple(vs):
                    hit = next(((i, t) for i, p in enumerate(parts)
                                if (t := _pinned_term(p, v)) is not None), None)
                    if hit is None:
                        continue
                    i, t = hit
                    rest = parts[:i] + parts[i + 1:]
                    if isinstance(t, Var) and any(t.name in _bound_names(r) for r in rest):
                        continue
                    parts = [subst_vars(r, {v: t}) for r in rest]
                    vs.remove(v)
                    changed = True
            return exists_block(vs, conj(parts))
    return phi


def _fragment_label(phi: Union[Formula, SoFormula]) -> str:
    tags = classify_fragment(phi)
    order = ["so-horn", "so-ehorn", "so-horn-r", "so-ehorn-r", "so-horn-star",
             "so-horn-star-r", "so-horn-s", "sigma11-normal", "pi11-normal",
             "general-so"]
    best = min(tags, key=lambda t: order.index(t.kind) if t.kind in order else 99)
    return str(best)


def _check_vocab_atoms(phi: Formula, vocab: VocabularySpec, *,
                       ignore: frozenset[str] = frozenset()) -> None:
    arities = vocab.arity_map()

    def walk(f: Formula) -> None:
        match f:
            case Rel(sym, args):
                if sym in ignore:
                    return
                if sym not in arities:
                    raise ValidationError(f"relation symbol {sym} is not in the vocabulary")
                if len(args) != arities[sym]:
                    raise ArityMismatch(
                        f"{sym} used with arity {len(args)}, vocabulary says {arities[sym]}")
            case Not(b) | Forall(_, b) | Exists(_, b):
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


# --- universal-to-existential swap for one relation quantifier ---------------

def swap_forall_exists(phi: Formula) -> tuple[Formula, TransformReport]:
    """Rewrite a universal individual quantifier over an existential relation
    quantifier into the opposite nesting.

    The new relation symbol gets one extra leading position carrying the
    swapped variable, so each point of the domain owns its own slice of
    the witness relation.
    """
    match phi:
        case Forall(x, SoExists(sym, arity, body)):
            pass
        case _:
            raise ShapeError(
                "expected a universal individual quantifier directly over an "
                "existential relation quantifier")
    steps: list[str] = []
    if x in _bound_names(body):
        body = rename_bound(body, FreshNames(_all_names(body) | {x}))
        steps.append(f"renamed bound variables shadowing {x}")
    used = set(rel_symbols(phi))
    wide = _fresh_rel(used, sym)
    swapped = map_rel_atoms(body, sym, lambda args: Rel(wide, (Var(x),) + args))
    if x not in free_vars(body):
        steps.append(f"{x} does not occur under the swapped quantifier; "
                     "the extra position is inert")
    steps.append(f"{sym}/{arity} widened to {wide}/{arity + 1} with {x} leading")
    out: Formula = SoExists(wide, arity + 1, Forall(x, swapped))
    report = TransformReport(
        rule="lemma1", contract="equivalent", fresh_symbols=(wide,),
        steps=tuple(steps), fragment=_fragment_label(out))
    return out, report


# --- eliminating universal relation quantifiers ------------------------------

def to_existential_fragment(phi: Union[Formula, SoFormula],
                            ) -> tuple[SoFormula, TransformReport]:
    """Remove every universal relation quantifier from a Horn formula.

    Works innermost first.  A universal quantifier over P is replaced by
    two instances: P as the complement of one excluded tuple (closed
    under a fresh block of universal individual variables) and P as the
    full relation.  Horn cores are closed under intersecting relation
    interpretations, and those instances generate everything by
    intersection.  Existential quantifiers sitting inside the eliminated
    one get widened by the fresh variables, appended, so they can move
    back out front.
    """
    sof = as_so_formula(phi)
    if FragmentTag(SO_HORN_STAR_R) not in classify_fragment(sof):
        raise ShapeError(
            "input must be Horn with respect to every quantified relation symbol")
    body = sof.body.to_formula() if isinstance(sof.body, ClausalCore) else sof.body
    prefix = list(sof.prefix)
    fresh_syms: list[str] = []
    steps: list[str] = []
    while any(q.q == FORALL for q in prefix):
        i = max(j for j, q in enumerate(prefix) if q.q == FORALL)
        target = prefix[i]
        tail = prefix[i + 1:]
        names = _all_names(body) | {q.sym for q in prefix} | set(rel_symbols(body))
        used_syms = set(rel_symbols(body)) | {q.sym for q in prefix}
        ys = _fresh_var_seq(names, "y", target.arity)
        yterms = tuple(Var(y) for y in ys)

        body_a = map_rel_atoms(body, target.sym, lambda args: neg(tuple_eq(args, yterms)))
        tail_a: list[SoQuant] = []
        for q in tail:
            renamed = _fresh_rel(used_syms, q.sym)
            fresh_syms.append(renamed)
            body_a = map_rel_atoms(body_a, q.sym,
                              lambda args, _r=renamed: Rel(_r, args + yterms))
            tail_a.append(SoQuant(EXISTS, renamed, q.arity + target.arity))

        body_b = map_rel_atoms(body, target.sym, lambda args: Top())
        tail_b: list[SoQuant] = []
        for q in tail:
            renamed = _fresh_rel(used_syms, q.sym)
            fresh_syms.append(renamed)
            body_b = map_rel_atoms(body_b, q.sym, lambda args, _r=renamed: Rel(_r, args))
            tail_b.append(SoQuant(EXISTS, renamed, q.arity))

        body = conj((forall_block(ys, fold_constants(body_a)), fold_constants(body_b)))
        prefix = prefix[:i] + tail_a + tail_b
        steps.append(
            f"eliminated the universal quantifier over {target.sym}/{target.arity}"
            + (f", widening {len(tail)} inner witnesses by {target.arity}" if tail else ""))
    out = SoFormula(tuple(prefix), body)
    report = TransformReport(
        rule="prop1", contract="equivalent", fresh_symbols=tuple(fresh_syms),
        steps=tuple(steps) or ("no universal relation quantifiers present",),
        fragment=_fragment_label(out))
    return out, report


# --- first-order formulas to rule programs -----------------------------------

def fo_to_datalog_r(phi: Formula, vocab: VocabularySpec, *,
                    free_order: Sequence[str] | None = None,
                    used_symbols: Iterable[str] = (),
                    max_matrix_literals: int = 10_000,
                    ) -> tuple[DatalogQuery, TransformReport]:
    """Compile a first-order formula into a program with universal body atoms.

    One relation per quantifier level: the innermost level collects the
    matrix disjuncts, and each quantifier peels its variable off the
    front of the previous level's argument list, through an existential
    join or a block-universal atom.  Every run stabilizes within
    quantifier depth plus two rounds.  Existentials pinned by an
    equality conjunct are substituted away first, which keeps the level
    arities small.
    """
    if not is_first_order(phi):
        raise ShapeError("first-order input required")
    _check_vocab_atoms(phi, vocab)
    pd = to_prenex_dnf(_one_point(phi), max_matrix_literals)
    frees = free_vars(phi)
    order = tuple(free_order) if free_order is not None else tuple(sorted(frees))
    # extra names beyond the free variables are allowed; those goal
    # positions just range over the whole domain
    if not set(frees) <= set(order) or len(set(order)) != len(order):
        raise ValidationError(f"free variable order {order} does not cover {sorted(frees)}")
    used = set(used_symbols) | {s for s, _ in vocab.relations} | set(vocab.constants)
    fresh = FreshNames(used)
    goal = fresh.rel("G")
    goal_head = Rel(goal, tuple(Var(v) for v in order))
    steps = [f"prenex prefix depth {len(pd.prefix)}, {len(pd.matrix)} matrix disjuncts"]
    if not pd.matrix:
        prog = DatalogProgram(vocab, (DatalogRule(goal_head, (goal_head,)),))
        validate_program(prog)
        report = TransformReport(
            rule="fo2dlr", contract="equivalent", fresh_symbols=(goal,),
            steps=tuple(steps + ["matrix is unsatisfiable; the goal never derives"]),
            fragment="datalog", query_vars=order)
        return DatalogQuery(prog, goal), report

    mv = set()
    for c in pd.matrix:
        for lit in c:
            mv |= _lit_vars(lit)
    m = len(pd.prefix)
    levels = [fresh.rel("S") for _ in range(m + 1)]
    cur: tuple[str, ...] = tuple(x for _, x in reversed(pd.prefix) if x in mv) + order
    rules: list[DatalogRule] = []
    for c in pd.matrix:
        rules.append(DatalogRule(Rel(levels[m], tuple(Var(v) for v in cur)),
                                 tuple(c)))
    for j in range(m - 1, -1, -1):
        q, x = pd.prefix[j]
        upper = Rel(levels[j + 1], tuple(Var(v) for v in cur))
        if x not in mv:
            body: tuple = (upper,)
            head_args = cur
        elif q == EXISTS:
            body = (upper,)
            head_args = cur[1:]
        else:
            body = (UnivAtom((x,), levels[j + 1], tuple(Var(v) for v in cur)),)
            head_args = cur[1:]
        rules.append(DatalogRule(Rel(levels[j], tuple(Var(v) for v in head_args)), body))
        cur = head_args
    rules.append(DatalogRule(goal_head, (Rel(levels[0], tuple(Var(v) for v in cur)),)))
    prog = DatalogProgram(vocab, tuple(rules))
    rep = validate_program(prog)
    steps.append(f"stages bounded by {m + 2}")
    report = TransformReport(
        rule="fo2dlr", contract="equivalent",
        fresh_symbols=tuple(levels) + (goal,), steps=tuple(steps),
        fragment=f"datalog-{rep.variant}", query_vars=order)
    return DatalogQuery(prog, goal), report


def _lit_vars(lit: Formula) -> set[str]:
    match lit:
        case Rel(_, args):
            return term_vars(args)
        case Eq(l, r):
            return term_vars((l, r))
        case Not(b):
            return _lit_vars(b)
        case Top() | Bottom():
            return set()
    raise ShapeError(f"not a literal: {lit!r}")


# --- folding side conditions into rules ---------------------------------------

def datalog_star_to_r(prog_or_query: Union[DatalogProgram, DatalogQuery],
                      ) -> tuple[Union[DatalogProgram, DatalogQuery], TransformReport]:
    """Replace opaque side conditions by compiled sub-programs.

    Each condition becomes a goal atom of its own first-order compile,
    joined on the condition's free variables by name.  Conditions only
    mention extensional symbols, so the sub-programs feed the main rules
    without feedback.
    """
    prog = prog_or_query.program if isinstance(prog_or_query, DatalogQuery) else prog_or_query
    validate_program(prog)
    used = set(prog.intentional()) | {s for s, _ in prog.vocab.relations} | set(prog.vocab.constants)
    new_rules: list[DatalogRule] = []
    extra: list[DatalogRule] = []
    fresh_syms: list[str] = []
    count = 0
    for rule in prog.rules:
        body: list = []
        for item in rule.body:
            if not isinstance(item, Cond):
                body.append(item)
                continue
            count += 1
            fv = tuple(sorted(free_vars(item.formula)))
            sub, subrep = fo_to_datalog_r(item.formula, prog.vocab,
                                          free_order=fv, used_symbols=used)
            used.update(sub.program.intentional())
            fresh_syms.extend(subrep.fresh_symbols)
            extra.extend(sub.program.rules)
            body.append(Rel(sub.goal, tuple(Var(v) for v in fv)))
        new_rules.append(DatalogRule(rule.head, tuple(body)))
    out_prog = DatalogProgram(prog.vocab, tuple(new_rules) + tuple(extra))
    rep = validate_program(out_prog)
    report = TransformReport(
        rule="star2r", contract="equivalent", fresh_symbols=tuple(fresh_syms),
        steps=(f"compiled {count} side conditions into sub-programs",),
        fragment=f"datalog-{rep.variant}")
    if isinstance(prog_or_query, DatalogQuery):
        return DatalogQuery(out_prog, prog_or_query.goal), report
    return out_prog, report


# --- Horn formulas to rule programs and back ----------------------------------

def _beta_to_item(beta: Union[Formula, SoEmbed]):
    if isinstance(beta, SoEmbed):
        raise ShapeError("embedded layer found; use the stratified rewrite")
    if is_literal(beta):
        return beta
    return Cond(beta)


def so_horn_to_datalog(phi: Union[Formula, SoFormula], vocab: VocabularySpec, *,
                       free_order: Sequence[str] | None = None,
                       used_symbols: Iterable[str] = (),
                       ) -> tuple[DatalogQuery, TransformReport]:
    """Turn an existential Horn formula into a rule program for its complement.

    Definite clauses become rules for widened copies of the quantified
    symbols, carrying the formula's free variables in appended
    positions.  Falsum clauses become rules for the goal: the goal holds
    at a tuple exactly when the least witness fails there, so the
    formula holds exactly off the goal relation.
    """
    sof = normalize_clauses(phi, symbols="all")
    if any(q.q == FORALL for q in sof.prefix):
        raise ShapeError("universal relation quantifier; run the existential-fragment "
                         "rewrite first")
    core = sof.core()
    frees = free_vars(sof.to_formula())
    order = tuple(free_order) if free_order is not None else tuple(sorted(frees))
    if set(order) != set(frees) or len(set(order)) != len(order):
        raise ValidationError(f"free variable order {order} does not cover {sorted(frees)}")
    xs = tuple(Var(v) for v in order)
    used = set(used_symbols) | {s for s, _ in vocab.relations} | set(vocab.constants)
    used |= {q.sym for q in sof.prefix}
    wide = {q.sym: _fresh_rel(used, q.sym) for q in sof.prefix}
    goal = _fresh_rel(used, "P")
    for cl in core.clauses:
        for b in cl.betas:
            if not isinstance(b, SoEmbed):
                _check_vocab_atoms(b, vocab)
    rules: list[DatalogRule] = []
    got_falsum = False
    for cl in core.clauses:
        items: list = []
        for a in cl.alphas:
            if isinstance(a, UnivAtom):
                items.append(UnivAtom(a.uvars, wide[a.sym], a.args + xs))
            else:
                items.append(Rel(wide[a.sym], a.args + xs))
        items.extend(_beta_to_item(b) for b in cl.betas)
        if cl.head is None:
            got_falsum = True
            rules.append(DatalogRule(Rel(goal, xs), tuple(items)))
        else:
            rules.append(DatalogRule(Rel(wide[cl.head.sym], cl.head.args + xs),
                                     tuple(items)))
    if not got_falsum:
        rules.append(DatalogRule(Rel(goal, xs), (Rel(goal, xs),)))
    headed = {r.head.sym for r in rules}
    vbase = "v"
    while any(f"{vbase}{i}" in order for i in range(1, 9)):
        vbase = "_" + vbase
    for q in sof.prefix:
        if wide[q.sym] not in headed:
            # quantified but never derived; a self-rule declares it and keeps it empty
            vs = tuple(Var(f"{vbase}{i}") for i in range(1, q.arity + 1)) + xs
            rules.append(DatalogRule(Rel(wide[q.sym], vs), (Rel(wide[q.sym], vs),)))
    prog = DatalogProgram(vocab, tuple(rules))
    rep = validate_program(prog)
    steps = [f"{len(core.clauses)} clauses over {len(sof.prefix)} quantified symbols",
             "goal relation is the complement of the formula"]
    if not got_falsum:
        steps.append("no falsum clause; the formula holds everywhere")
    report = TransformReport(
        rule="horn2dl", contract="complement",
        fresh_symbols=tuple(wide.values()) + (goal,), steps=tuple(steps),
        fragment=f"datalog-{rep.variant}", query_vars=order)
    return DatalogQuery(prog, goal), report


def datalog_to_so_horn(query: DatalogQuery) -> tuple[SoFormula, TransformReport]:
    """Turn a rule program with a goal into a Horn formula for its complement.

    The formula quantifies one relation per surviving intentional symbol
    and says: the relations are closed under the rules and the goal
    misses the query tuple.  Such closed relations exist exactly when
    the fixed point misses it, which gives the complement reading.
    """
    validate_program(query.program)
    if query.goal not in query.program.intentional():
        raise ShapeError(f"goal symbol {query.goal} heads no rule")
    steps: list[str] = []
    prog = normalize_zeroary(query.program)
    if prog is not query.program:
        steps.append("replaced tested zero-ary symbols by unary shadows")
    rules = [r for r in prog.rules
             if r.head.args or r.head.sym == query.goal]
    dropped = len(prog.rules) - len(rules)
    if dropped:
        steps.append(f"dropped {dropped} rules for unread zero-ary symbols")
    intent: dict[str, int] = {}
    for r in rules:
        intent.setdefault(r.head.sym, len(r.head.args))
    names = set()
    for r in rules:
        names |= rule_vars(r)
        for it in r.body:
            if isinstance(it, UnivAtom):
                names |= set(it.uvars)
    uvars = tuple(sorted(set().union(*(rule_vars(r) for r in rules)) if rules else set()))
    xs = _fresh_var_seq(set(names), "x", intent[query.goal])
    clauses: list[HornClause] = []
    for r in rules:
        alphas: list = []
        betas: list[Formula] = []
        for it in r.body:
            match it:
                case Rel(sym, _) if sym in intent:
                    alphas.append(it)
                case Rel(_, _):
                    betas.append(it)
                case UnivAtom(uv, sym, args):
                    if sym in intent:
                        alphas.append(it)
                    else:
                        betas.append(forall_block(uv, Rel(sym, args)))
                case Not(_) | Eq(_, _):
                    betas.append(it)
                case Cond(f):
                    betas.append(f)
        clauses.append(HornClause(tuple(alphas), tuple(betas), r.head))
    clauses.append(HornClause((Rel(query.goal, tuple(Var(v) for v in xs)),), (), None))
    seen: list[str] = []
    for r in rules:
        if r.head.sym not in seen:
            seen.append(r.head.sym)
    prefix = tuple(SoQuant(EXISTS, s, intent[s]) for s in seen)
    out = SoFormula(prefix, ClausalCore(uvars, tuple(clauses)))
    report = TransformReport(
        rule="dl2horn", contract="complement", fresh_symbols=(),
        steps=tuple(steps + [f"{len(clauses)} clauses, goal miss stated at {xs}"]),
        fragment=_fragment_label(out), query_vars=xs)
    return out, report


# --- rule programs to fixed points and back -----------------------------------

def _body_item_formula(item, lower: Mapping[str, Callable[[tuple[Term, ...]], Formula]],
                       ) -> Formula:
    match item:
        case Rel(sym, args) if sym in lower:
            return lower[sym](args)
        case Rel(_, _) | Eq(_, _):
            return item
        case Not(Rel(sym, args)) if sym in lower:
            return Not(lower[sym](args))
        case Not(_):
            return item
        case UnivAtom(uv, sym, args):
            if sym in lower:
                return forall_block(uv, lower[sym](args))
            return forall_block(uv, Rel(sym, args))
        case Cond(f):
            out = f
            for sym, mk in lower.items():
                out = map_rel_atoms(out, sym, mk)
            return out
    raise ShapeError(f"bad body item {item!r}")


def _program_to_comps(prog: DatalogProgram, used_names: set[str],
                      lower: Mapping[str, Callable[[tuple[Term, ...]], Formula]],
                      ) -> tuple[SLfpComp, ...]:
    intent = prog.intentional()
    order: list[str] = []
    for r in prog.rules:
        if r.head.sym not in order:
            order.append(r.head.sym)
    comps = []
    for sym in order:
        ws = _fresh_var_seq(used_names, "u", intent[sym])
        wterms = tuple(Var(w) for w in ws)
        branches = []
        for r in prog.rules:
            if r.head.sym != sym:
                continue
            guards = [Eq(w, t) for w, t in zip(wterms, r.head.args)]
            parts = guards + [_body_item_formula(it, lower) for it in r.body]
            branches.append(exists_block(sorted(rule_vars(r)), conj(parts)))
        comps.append(SLfpComp(sym, ws, disj(branches)))
    return tuple(comps)


def _widen_zeroary(strata: tuple[DatalogProgram, ...],
                   ) -> tuple[tuple[DatalogProgram, ...], dict[str, str], str]:
    """Replace zero-ary intentional symbols by unary all-or-nothing ones.

    A zero-ary head becomes a head over one fresh variable the body never
    mentions, so the widened relation is either empty or the whole domain.
    Body tests read the widened symbol at that same variable.
    """
    zero = sorted(s for p in strata for s, a in p.intentional().items() if a == 0)
    if not zero:
        return strata, {}, ""
    taken: set[str] = set()
    names: set[str] = set()
    for p in strata:
        taken |= {s for s, _ in p.vocab.relations} | set(p.vocab.constants)
        taken |= set(p.intentional())
        for r in p.rules:
            names |= rule_vars(r)
            for it in r.body:
                if isinstance(it, Cond):
                    names |= _all_names(it.formula)
    wide = {s: _fresh_rel(taken, s) for s in zero}
    (w,) = _fresh_var_seq(names, "w", 1)

    def fix_atom(a: Rel) -> Rel:
        if a.sym in wide and not a.args:
            return Rel(wide[a.sym], (Var(w),))
        return a

    def fix_item(it):
        match it:
            case Rel(_, _):
                return fix_atom(it)
            case Not(Rel(_, _) as a):
                return Not(fix_atom(a))
            case Cond(f):
                for s, ws in wide.items():
                    f = map_rel_atoms(f, s, lambda _args, _ws=ws: Rel(_ws, (Var(w),)))
                return Cond(f)
            case _:
                return it

    out = []
    for p in strata:
        rules = tuple(DatalogRule(fix_atom(r.head), tuple(fix_item(it) for it in r.body))
                      for r in p.rules)
        rels = tuple((wide[s], 1) if s in wide and a == 0 else (s, a)
                     for s, a in p.vocab.relations)
        out.append(DatalogProgram(VocabularySpec(rels, p.vocab.constants), rules, p.variant))
    return tuple(out), wide, w


def datalog_r_to_slfp(query: Union[DatalogQuery, StratifiedQuery],
                      ) -> tuple[Formula, TransformReport]:
    """Express a program query as a simultaneous least fixed point.

    Each intentional symbol becomes one component whose body is the
    disjunction of its rules: existential closure of the rule variables,
    equalities pinning the head arguments to the component's variables,
    and the body items as a conjunction.  Strata compile bottom up, the
    finished fixed point of a layer substituted for its symbols above.
    """
    strata = (query.program.strata if isinstance(query, StratifiedQuery)
              else (query.program,))
    for p in strata:
        validate_program(p)
    strata, wide, _ = _widen_zeroary(strata)
    goal = wide.get(query.goal, query.goal)
    used_names: set[str] = set()
    for p in strata:
        for r in p.rules:
            used_names |= rule_vars(r)
            for it in r.body:
                if isinstance(it, UnivAtom):
                    used_names |= set(it.uvars)
                elif isinstance(it, Cond):
                    used_names |= _all_names(it.formula)
    lower: dict[str, Callable[[tuple[Term, ...]], Formula]] = {}
    goal_comps = None
    for p in strata:
        comps = _program_to_comps(p, used_names, dict(lower))
        for c in comps:
            lower[c.rvar] = (lambda args, _comps=comps, _g=c.rvar:
                             SLfp(_comps, _g, args))
        if goal in p.intentional():
            goal_comps = comps
    if goal_comps is None or goal not in {c.rvar for c in goal_comps}:
        raise ShapeError(f"goal symbol {query.goal} heads no rule")
    arity = next(len(c.vars) for c in goal_comps if c.rvar == goal)
    xs = _fresh_var_seq(used_names, "x", arity)
    out: Formula = SLfp(goal_comps, goal, tuple(Var(v) for v in xs))
    steps = [f"{sum(len(p.rules) for p in strata)} rules into "
             f"{len(strata)} fixed-point layers"]
    if query.goal in wide:
        # zero-ary goal: the widened component is empty or everything,
        # so its nonemptiness is the original truth value
        out = Exists(xs[0], out)
        xs = ()
        steps.append(f"zero-ary goal read as nonemptiness of {wide[query.goal]}")
    require_positive(out)
    report = TransformReport(
        rule="dlr2lfp", contract="equivalent", fresh_symbols=tuple(sorted(wide.values())),
        steps=tuple(steps), fragment="fo-slfp", query_vars=xs)
    return out, report


def lfp_normal_to_datalog_r(phi: Formula, vocab: VocabularySpec, *,
                            free_order: Sequence[str] | None = None,
                            used_symbols: Iterable[str] = (),
                            ) -> tuple[DatalogQuery, TransformReport]:
    """Compile an existential block over one least fixed point into a program.

    The fixed-point body compiles first-order style with the bound
    symbol treated as given; its atoms then get the body's parameters
    prepended and point at the recursive relation, which is tied back to
    the compile's goal by one rule.  A final rule reads the fixed point
    at the application tuple.
    """
    us: list[str] = []
    node = phi
    while isinstance(node, Exists):
        us.append(node.var)
        node = node.body
    if isinstance(node, SLfp) and len(node.comps) == 1 and node.goal == node.comps[0].rvar:
        node = slfp_to_lfp(node)
    if not isinstance(node, Lfp):
        raise ShapeError("expected an existential block over a single "
                         "fixed-point application")
    if len(node.args) != len(node.vars):
        raise ArityMismatch(
            f"fixed point over {len(node.vars)} variables applied to {len(node.args)} terms")
    if not is_first_order(node.body):
        raise ShapeError("fixed-point body must be first-order; normalize nested "
                         "fixed points first")
    require_positive(node)
    zs = node.vars
    params = tuple(sorted(free_vars(node.body) - set(zs)))
    frees = free_vars(phi)
    order = tuple(free_order) if free_order is not None else tuple(sorted(frees))
    if set(order) != set(frees) or len(set(order)) != len(order):
        raise ValidationError(f"free variable order {order} does not cover {sorted(frees)}")
    used = set(used_symbols) | {s for s, _ in vocab.relations} | set(vocab.constants)
    body = node.body
    zsym = node.rvar
    if vocab.has_relation(zsym) or zsym in vocab.constants:
        renamed = _fresh_rel(set(used) | {zsym}, zsym)
        body = map_rel_atoms(body, zsym, lambda args, _r=renamed: Rel(_r, args))
        zsym = renamed
    inner_vocab = vocab.extend(((zsym, len(zs)),))
    _check_vocab_atoms(body, inner_vocab)
    sub, subrep = fo_to_datalog_r(body, inner_vocab,
                                  free_order=tuple(zs) + params,
                                  used_symbols=used | {zsym})
    used.update(sub.program.intentional())
    zfix = _fresh_rel(used, node.rvar)
    pvars = tuple(Var(v) for v in params)
    rules: list[DatalogRule] = []
    for r in sub.program.rules:
        items = []
        for it in r.body:
            if isinstance(it, Rel) and it.sym == zsym:
                items.append(Rel(zfix, pvars + it.args))
            elif isinstance(it, UnivAtom) and it.sym == zsym:
                raise ShapeError("fixed-point symbol under a universal body atom")
            elif isinstance(it, Not) and isinstance(it.body, Rel) and it.body.sym == zsym:
                raise ShapeError("fixed-point symbol occurs negated")
            else:
                items.append(it)
        rules.append(DatalogRule(r.head, tuple(items)))
    zterms = tuple(Var(v) for v in zs)
    rules.append(DatalogRule(Rel(zfix, pvars + zterms),
                             (Rel(sub.goal, zterms + pvars),)))
    goal = FreshNames(used).rel("G")
    rules.append(DatalogRule(Rel(goal, tuple(Var(v) for v in order)),
                             (Rel(zfix, pvars + node.args),)))
    prog = DatalogProgram(vocab, tuple(rules))
    rep = validate_program(prog)
    report = TransformReport(
        rule="lfp2dlr", contract="equivalent",
        fresh_symbols=tuple(subrep.fresh_symbols) + (zfix, goal),
        steps=(f"fixed-point body compiled with {len(params)} parameters prepended",),
        fragment=f"datalog-{rep.variant}", query_vars=order)
    return DatalogQuery(prog, goal), report


# --- first-order formulas to stratified programs -------------------------------

def fo_to_s_datalog(phi: Formula, vocab: VocabularySpec, *,
                    free_order: Sequence[str] | None = None,
                    used_symbols: Iterable[str] = (),
                    ) -> tuple[StratifiedQuery, TransformReport]:
    """Compile a first-order formula structurally, negation by stratum.

    Connectives and existential quantifiers turn into rules in place; a
    negation over anything ever derived opens a fresh stratum above its
    operand, and universal quantifiers spend two strata through their
    dual.  Negated extensional atoms stay literal and cost nothing.
    """
    if not is_first_order(phi):
        raise ShapeError("first-order input required")
    _check_vocab_atoms(phi, vocab)
    work = fold_constants(phi)
    frees = free_vars(phi)
    order = tuple(free_order) if free_order is not None else tuple(sorted(frees))
    if set(order) != set(frees) or len(set(order)) != len(order):
        raise ValidationError(f"free variable order {order} does not cover {sorted(frees)}")
    if not isinstance(work, (Top, Bottom)) and not binders_apart(work):
        work = rename_bound(work, FreshNames(_all_names(work)))
    used = set(used_symbols) | {s for s, _ in vocab.relations} | set(vocab.constants)
    fresh = FreshNames(used)
    rules_at: dict[int, list[DatalogRule]] = {}

    def add(level: int, rule: DatalogRule) -> None:
        rules_at.setdefault(level, []).append(rule)

    ext = {s for s, _ in vocab.relations}

    def compile_(f: Formula) -> tuple[str, tuple[str, ...], int]:
        fv = tuple(sorted(free_vars(f)))
        head_args = tuple(Var(v) for v in fv)
        match f:
            case Top():
                q = fresh.rel("Q")
                add(1, DatalogRule(Rel(q, ()), ()))
                return q, (), 1
            case Bottom():
                q = fresh.rel("Q")
                add(1, DatalogRule(Rel(q, ()), (Rel(q, ()),)))
                return q, (), 1
            case Rel(_, _) | Eq(_, _):
                q = fresh.rel("Q")
                add(1, DatalogRule(Rel(q, head_args), (f,)))
                return q, fv, 1
            case Not(Rel(sym, _)) if sym in ext:
                q = fresh.rel("Q")
                add(1, DatalogRule(Rel(q, head_args), (f,)))
                return q, fv, 1
            case Not(Eq(_, _)):
                q = fresh.rel("Q")
                add(1, DatalogRule(Rel(q, head_args), (f,)))
                return q, fv, 1
            case Not(b):
                s, ordb, lv = compile_(b)
                q = fresh.rel("Q")
                add(lv + 1, DatalogRule(Rel(q, head_args),
                                        (Not(Rel(s, tuple(Var(v) for v in ordb))),)))
                return q, fv, lv + 1
            case And(ps):
                subs = [compile_(p) for p in ps]
                lv = max(l for _, _, l in subs)
                q = fresh.rel("Q")
                body = tuple(Rel(s, tuple(Var(v) for v in o)) for s, o, _ in subs)
                add(lv, DatalogRule(Rel(q, head_args), body))
                return q, fv, lv
            case Or(ps):
                subs = [compile_(p) for p in ps]
                lv = max(l for _, _, l in subs)
                q = fresh.rel("Q")
                for s, o, _ in subs:
                    add(lv, DatalogRule(Rel(q, head_args),
                                        (Rel(s, tuple(Var(v) for v in o)),)))
                return q, fv, lv
            case Implies(l, r):
                return compile_(disj((neg(l), r)))
            case Exists(_, b):
                s, ordb, lv = compile_(b)
                q = fresh.rel("Q")
                add(lv, DatalogRule(Rel(q, head_args),
                                    (Rel(s, tuple(Var(v) for v in ordb)),)))
                return q, fv, lv
            case Forall(v, b):
                s, ordb, lv = compile_(b)
                qn = fresh.rel("Q")
                add(lv + 1, DatalogRule(Rel(qn, tuple(Var(w) for w in ordb)),
                                        (Not(Rel(s, tuple(Var(w) for w in ordb))),)))
                qe = fresh.rel("Q")
                ex_args = tuple(w for w in ordb if w != v)
                add(lv + 1, DatalogRule(Rel(qe, tuple(Var(w) for w in ex_args)),
                                        (Rel(qn, tuple(Var(w) for w in ordb)),)))
                q = fresh.rel("Q")
                add(lv + 2, DatalogRule(Rel(q, head_args),
                                        (Not(Rel(qe, tuple(Var(w) for w in ex_args))),)))
                return q, fv, lv + 2
        raise ShapeError(f"not a first-order node: {f!r}")

    top_sym, top_order, top_level = compile_(work)
    goal = fresh.rel("G")
    add(top_level, DatalogRule(Rel(goal, tuple(Var(v) for v in order)),
                               (Rel(top_sym, tuple(Var(v) for v in top_order)),)))
    progs: list[DatalogProgram] = []
    cur_vocab = vocab
    for level in sorted(rules_at):
        p = DatalogProgram(cur_vocab, tuple(rules_at[level]))
        validate_program(p)
        progs.append(p)
        cur_vocab = cur_vocab.extend(sorted(p.intentional().items()))
    sq = StratifiedQuery(StratifiedProgram(tuple(progs)), goal)
    report = TransformReport(
        rule="fo2sdl", contract="equivalent",
        fresh_symbols=tuple(s for lv in sorted(rules_at)
                            for s in dict.fromkeys(r.head.sym for r in rules_at[lv])),
        steps=(f"{len(progs)} strata, negation depth drives the count",),
        fragment="s-datalog", query_vars=order)
    return sq, report


# --- stratified Horn formulas to stratified programs ---------------------------

def stratified_horn_datalog(phi: Union[Formula, SoFormula], vocab: VocabularySpec, *,
                            free_order: Sequence[str] | None = None,
                            ) -> tuple[StratifiedQuery, TransformReport]:
    """Compile a layered Horn formula into a stratified program, layer by layer.

    Embedded side conditions compile first, each an independent chain;
    chains merge bottom-aligned, and the outer layer sits one stratum
    above the deepest of them.  A positively used condition appears as a
    negated goal atom and a negated one as a positive goal atom, because
    every layer's goal relation is the complement of its formula.
    """
    used_syms = {s for s, _ in vocab.relations} | set(vocab.constants)
    fresh_syms: list[str] = []

    def compile_layer(f: Union[Formula, SoFormula], forder: tuple[str, ...],
                      ) -> tuple[dict[int, list[DatalogRule]], str, int]:
        sof = normalize_clauses(f, symbols="all")
        if any(q.q == FORALL for q in sof.prefix):
            raise ShapeError("universal relation quantifier inside a layer")
        core = sof.core()
        frees = free_vars(sof.to_formula())
        if set(forder) != set(frees):
            raise ValidationError(f"order {forder} does not cover {sorted(frees)}")
        embeds: dict[Formula, tuple[str, tuple[str, ...]]] = {}
        levels: dict[int, list[DatalogRule]] = {}
        depth_below = 0
        for cl in core.clauses:
            if any(isinstance(a, UnivAtom) for a in cl.alphas):
                raise ShapeError("universal body atoms have no stratified reading here")
            for b in cl.betas:
                if isinstance(b, SoEmbed) and b.formula not in embeds:
                    sub_order = tuple(sorted(
                        free_vars(as_so_formula(b.formula).to_formula())))
                    sub_levels, sub_goal, sub_depth = compile_layer(b.formula, sub_order)
                    for lv, rs in sub_levels.items():
                        levels.setdefault(lv, []).extend(rs)
                    embeds[b.formula] = (sub_goal, sub_order)
                    depth_below = max(depth_below, sub_depth)
                elif not isinstance(b, SoEmbed) and not is_literal(b):
                    raise ShapeError("side conditions in a layer must be literals "
                                     "or embedded layers")
        mine = depth_below + 1
        used_syms.update(q.sym for q in sof.prefix)
        wide = {q.sym: _fresh_rel(used_syms, q.sym) for q in sof.prefix}
        goal = _fresh_rel(used_syms, "P")
        fresh_syms.extend(list(wide.values()) + [goal])
        xs = tuple(Var(v) for v in forder)
        got_falsum = False
        out_rules: list[DatalogRule] = []
        for cl in core.clauses:
            items: list = []
            for a in cl.alphas:
                items.append(Rel(wide[a.sym], a.args + xs))
            for b in cl.betas:
                if isinstance(b, SoEmbed):
                    sub_goal, sub_order = embeds[b.formula]
                    atom = Rel(sub_goal, tuple(Var(v) for v in sub_order))
                    items.append(atom if b.negated else Not(atom))
                else:
                    _check_vocab_atoms(b, vocab)
                    items.append(b)
            if cl.head is None:
                got_falsum = True
                out_rules.append(DatalogRule(Rel(goal, xs), tuple(items)))
            else:
                out_rules.append(DatalogRule(Rel(wide[cl.head.sym], cl.head.args + xs),
                                             tuple(items)))
        if not got_falsum:
            out_rules.append(DatalogRule(Rel(goal, xs), (Rel(goal, xs),)))
        headed = {r.head.sym for r in out_rules}
        for q in sof.prefix:
            if wide[q.sym] not in headed:
                vs = tuple(Var(f"_v{i}") for i in range(1, q.arity + 1)) + xs
                out_rules.append(DatalogRule(Rel(wide[q.sym], vs),
                                             (Rel(wide[q.sym], vs),)))
        levels.setdefault(mine, []).extend(out_rules)
        return levels, goal, mine

    frees = free_vars(as_so_formula(phi).to_formula())
    order = tuple(free_order) if free_order is not None else tuple(sorted(frees))
    if set(order) != set(frees) or len(set(order)) != len(order):
        raise ValidationError(f"free variable order {order} does not cover {sorted(frees)}")
    levels, goal, depth = compile_layer(phi, order)
    progs: list[DatalogProgram] = []
    cur_vocab = vocab
    for level in sorted(levels):
        p = DatalogProgram(cur_vocab, tuple(levels[level]))
        validate_program(p)
        progs.append(p)
        cur_vocab = cur_vocab.extend(sorted(p.intentional().items()))
    sq = StratifiedQuery(StratifiedProgram(tuple(progs)), goal)
    report = TransformReport(
        rule="sdl-horn", contract="complement", fresh_symbols=tuple(fresh_syms),
        steps=(f"{depth} layers compiled, goal relation complements the formula",),
        fragment="s-datalog", query_vars=order)
    return sq, report


# --- normal form surgery on quantifier prefixes --------------------------------

def _split_blocks(phi: Formula, first: str) -> tuple[tuple[str, ...], tuple[str, ...], Formula]:
    """Split a two-block prenex prefix, ``first`` naming the outer kind."""
    outer: list[str] = []
    inner: list[str] = []
    node = phi
    kinds = {EXISTS: Exists, FORALL: Forall}
    second = FORALL if first == EXISTS else EXISTS
    while isinstance(node, kinds[first]):
        outer.append(node.var)
        node = node.body
    while isinstance(node, kinds[second]):
        inner.append(node.var)
        node = node.body
    from .syntax import is_quantifier_free
    if not is_quantifier_free(node):
        raise ShapeError("matrix is not quantifier-free; not in normal form")
    return tuple(outer), tuple(inner), node


def sigma11_push_exists(phi: Union[Formula, SoFormula],
                        ) -> tuple[SoFormula, TransformReport]:
    """Trade the inner existential block of an existential normal form for a
    relation quantifier.

    A fresh relation collects, per point of the universal block, a
    non-empty set of witnesses all of which satisfy the matrix.  The
    result has a purely universal individual prefix.
    """
    sof = as_so_formula(phi)
    if any(q.q == FORALL for q in sof.prefix):
        raise ShapeError("prefix must be existential")
    body = sof.body.to_formula() if isinstance(sof.body, ClausalCore) else sof.body
    xs, ys, matrix = _split_blocks(body, FORALL)
    if not ys:
        report = TransformReport(
            rule="sig11", contract="equivalent", fresh_symbols=(),
            steps=("no inner existential block; input returned unchanged",),
            fragment=_fragment_label(sof))
        return sof, report
    names = _all_names(body)
    used = set(rel_symbols(body)) | {q.sym for q in sof.prefix}
    wit = _fresh_rel(used, "P")
    zs = _fresh_var_seq(names, "z", len(ys))
    xterms = tuple(Var(v) for v in xs)
    witnessed = Rel(wit, xterms + tuple(Var(z) for z in zs))
    guarded = Implies(Rel(wit, xterms + tuple(Var(y) for y in ys)), matrix)
    out = SoFormula(sof.prefix + (SoQuant(EXISTS, wit, len(xs) + len(ys)),),
                    forall_block(xs + ys,
                                 exists_block(zs, conj((witnessed, guarded)))))
    report = TransformReport(
        rule="sig11", contract="equivalent", fresh_symbols=(wit,),
        steps=(f"witness relation of arity {len(xs)}+{len(ys)}, universal prefix only",),
        fragment=_fragment_label(out))
    return out, report


def pi11_to_ehorn_r(phi: Union[Formula, SoFormula],
                    ) -> tuple[SoFormula, TransformReport]:
    """Rewrite a universal normal form into Horn shape over one fresh symbol.

    The fresh relation over-approximates the complement of the inner
    existential witnesses: every matrix failure forces membership, and a
    block-universal clause forbids it from being everything.  The result
    is Horn with respect to the fresh symbol alone, with the original
    universally quantified symbols free to appear on either side.
    """
    sof = as_so_formula(phi)
    if any(q.q == EXISTS for q in sof.prefix):
        raise ShapeError("prefix must be universal")
    body = sof.body.to_formula() if isinstance(sof.body, ClausalCore) else sof.body
    xs, ys, matrix = _split_blocks(body, EXISTS)
    cnf = to_cnf_matrix(matrix)
    names = _all_names(body)
    used = set(rel_symbols(body)) | {q.sym for q in sof.prefix}
    rsym = _fresh_rel(used, "R")
    zs = _fresh_var_seq(names, "z", len(xs))
    xterms = tuple(Var(v) for v in xs)
    cap: Formula = Implies(forall_block(zs, Rel(rsym, tuple(Var(z) for z in zs))),
                           Bottom())
    if not zs:
        cap = Implies(Rel(rsym, ()), Bottom())
    clauses: list[Formula] = [cap]
    for cl in cnf:
        ante = conj(_nnf_literal_neg(lit) for lit in cl)
        head = Rel(rsym, xterms)
        clauses.append(head if isinstance(ante, Top) else Implies(ante, head))
    out = SoFormula(sof.prefix + (SoQuant(EXISTS, rsym, len(xs)),),
                    forall_block(xs + ys, conj(clauses)))
    report = TransformReport(
        rule="pi11-ehorn", contract="equivalent", fresh_symbols=(rsym,),
        steps=(f"{len(cnf)} matrix clauses complemented into rules for {rsym}",),
        fragment=_fragment_label(out))
    return out, report
