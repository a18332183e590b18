"""Seeded random inputs for the equivalence lab and the test suite.

Every generator takes an explicit ``random.Random`` so a corpus is
reproducible from a single seed.  The profiles are deliberately small:
the lab checks equivalences by exhausting structures of size up to
three, and formulas with relation quantifiers are checked by subset
enumeration, so generated arities and quantifier counts stay low enough
to keep those sweeps affordable.
"""

from __future__ import annotations

import random
from typing import Sequence

from .core import FiniteStructure, VocabularySpec
from .datalog import Cond, DatalogProgram, DatalogQuery, DatalogRule, validate_program
from .second_order import (
    EXISTS, FORALL, ClausalCore, HornClause, SoEmbed, SoFormula, SoQuant,
)
from .syntax import (
    And, Cst, Eq, Exists, Forall, Formula, Implies, Lfp, Not, Or, Rel, SoExists,
    Term, UnivAtom, Var, conj, disj, exists_block, forall_block,
)

EDGE = VocabularySpec((("E", 2),), ())
COLORED = VocabularySpec((("U", 1), ("E", 2)), ())
UNARY1 = VocabularySpec((("U", 1),), ())
UNARY2 = VocabularySpec((("U", 1), ("V", 1)), ())
POINTED = VocabularySpec((("E", 2),), ("c",))


def random_structure(rng: random.Random, vocab: VocabularySpec, size: int,
                     *, density: float = 0.5) -> FiniteStructure:
    rels = {}
    for sym, arity in vocab.relations:
        tuples = []
        for tup in _tuples(size, arity):
            if rng.random() < density:
                tuples.append(tup)
        rels[sym] = frozenset(tuples)
    consts = {c: rng.randrange(size) for c in vocab.constants}
    return FiniteStructure(vocab, size, rels, consts)


def _tuples(size: int, arity: int):
    out = [()]
    for _ in range(arity):
        out = [t + (e,) for t in out for e in range(size)]
    return out


def _term(rng: random.Random, names: Sequence[str], consts: Sequence[str]) -> Term:
    if consts and rng.random() < 0.2:
        return Cst(rng.choice(list(consts)))
    return Var(rng.choice(list(names)))


def random_literal(rng: random.Random, vocab: VocabularySpec,
                   names: Sequence[str]) -> Formula:
    roll = rng.random()
    if roll < 0.15:
        lit: Formula = Eq(_term(rng, names, vocab.constants),
                          _term(rng, names, vocab.constants))
    else:
        sym, arity = rng.choice(list(vocab.relations))
        args = tuple(_term(rng, names, vocab.constants) for _ in range(arity))
        lit = Rel(sym, args)
    if rng.random() < 0.4:
        lit = Not(lit)
    return lit


def random_qf(rng: random.Random, vocab: VocabularySpec, names: Sequence[str],
              *, budget: int = 5) -> Formula:
    """A quantifier-free formula with at most ``budget`` literals."""
    if budget <= 1 or rng.random() < 0.3:
        return random_literal(rng, vocab, names)
    left = rng.randint(1, budget - 1)
    a = random_qf(rng, vocab, names, budget=left)
    b = random_qf(rng, vocab, names, budget=budget - left)
    match rng.randrange(4):
        case 0:
            return And((a, b))
        case 1:
            return Or((a, b))
        case 2:
            return Implies(a, b)
        case _:
            return Not(And((a, b)))


def random_prenex_fo(rng: random.Random, vocab: VocabularySpec, *,
                     max_quants: int = 3, n_free: int = 0) -> Formula:
    """A prenex formula; quantifier rank equals the prefix length."""
    depth = rng.randint(1, max_quants)
    bound = [f"v{i}" for i in range(1, depth + 1)]
    frees = [f"w{i}" for i in range(1, n_free + 1)]
    body = random_qf(rng, vocab, bound + frees, budget=rng.randint(2, 5))
    for name in reversed(bound):
        body = Forall(name, body) if rng.random() < 0.5 else Exists(name, body)
    return body


def random_fo(rng: random.Random, vocab: VocabularySpec, names: Sequence[str],
              *, depth: int = 3) -> Formula:
    """A first-order formula with quantifiers allowed at any depth."""
    if depth <= 0 or rng.random() < 0.25:
        return random_qf(rng, vocab, names, budget=3)
    match rng.randrange(5):
        case 0:
            fresh = f"q{depth}"
            sub = random_fo(rng, vocab, list(names) + [fresh], depth=depth - 1)
            return Forall(fresh, sub) if rng.random() < 0.5 else Exists(fresh, sub)
        case 1:
            return Not(random_fo(rng, vocab, names, depth=depth - 1))
        case 2:
            return And((random_fo(rng, vocab, names, depth=depth - 1),
                        random_fo(rng, vocab, names, depth=depth - 1)))
        case 3:
            return Or((random_fo(rng, vocab, names, depth=depth - 1),
                       random_fo(rng, vocab, names, depth=depth - 1)))
        case _:
            return Implies(random_fo(rng, vocab, names, depth=depth - 1),
                           random_fo(rng, vocab, names, depth=depth - 1))


def _horn_clause(rng: random.Random, clausal: Sequence[str], uvars: Sequence[str],
                 vocab: VocabularySpec, *, allow_univ: bool) -> HornClause:
    alphas = []
    for _ in range(rng.randrange(3)):
        sym = rng.choice(list(clausal))
        if allow_univ and rng.random() < 0.25:
            alphas.append(UnivAtom(("y_",), sym, (Var("y_"),)))
        else:
            alphas.append(Rel(sym, (Var(rng.choice(list(uvars))),)))
    betas = tuple(random_literal(rng, vocab, uvars) for _ in range(rng.randrange(3)))
    head = None
    if rng.random() < 0.75:
        head = Rel(rng.choice(list(clausal)), (Var(rng.choice(list(uvars))),))
    return HornClause(tuple(alphas), betas, head)


def random_horn_sentence(rng: random.Random, *, allow_univ: bool = False,
                         vocab: VocabularySpec = EDGE) -> SoFormula:
    """An existential Horn sentence with unary quantified symbols.

    Unary symbols keep the subset enumeration on the formula side cheap
    when the sentence is checked against its complement program.
    """
    clausal = ["S"] if rng.random() < 0.6 else ["S", "T"]
    uvars = ("x", "y")
    n_clauses = rng.randint(2, 4)
    clauses = [_horn_clause(rng, clausal, uvars, vocab, allow_univ=allow_univ)
               for _ in range(n_clauses)]
    if all(c.head is not None for c in clauses) and rng.random() < 0.5:
        clauses.append(HornClause((Rel(clausal[0], (Var("x"),)),),
                                  (random_literal(rng, vocab, uvars),), None))
    prefix = tuple(SoQuant(EXISTS, sym, 1) for sym in clausal)
    return SoFormula(prefix, ClausalCore(uvars, tuple(clauses)))


def random_horn_star_r(rng: random.Random, *, vocab: VocabularySpec = UNARY1,
                       ) -> SoFormula:
    """A Horn sentence with a leading universal relation quantifier.

    The shape feeds the universal-quantifier elimination rewrite: side
    conditions may be any first-order formulas over the base vocabulary,
    and universal atoms over the quantified symbols are allowed.
    """
    uvars = ("x",)
    clausal = ["S", "T"]
    clauses = []
    for _ in range(rng.randint(2, 3)):
        alphas = []
        roll = rng.random()
        if roll < 0.4:
            alphas.append(UnivAtom(("y_",), "S", (Var("y_"),)))
        elif roll < 0.7:
            alphas.append(Rel("S", (Var("x"),)))
        if rng.random() < 0.4:
            alphas.append(Rel("T", (Var("x"),)))
        betas = []
        if rng.random() < 0.5:
            betas.append(random_literal(rng, vocab, uvars))
        if rng.random() < 0.3:
            betas.append(Exists("z_", random_qf(rng, vocab, ("x", "z_"), budget=2)))
        head = Rel("T", (Var("x"),)) if rng.random() < 0.7 else None
        clauses.append(HornClause(tuple(alphas), tuple(betas), head))
    prefix = (SoQuant(FORALL, "S", 1), SoQuant(EXISTS, "T", 1))
    return SoFormula(prefix, ClausalCore(uvars, tuple(clauses)))


def random_swap_input(rng: random.Random, *, vocab: VocabularySpec = UNARY2) -> Formula:
    """A formula of the shape ``forall x exists2 S body``."""
    body_parts = []
    for _ in range(rng.randint(1, 2)):
        lit = random_qf(rng, vocab, ("x", "y"), budget=2)
        atom = Rel("S", (Var(rng.choice(["x", "y"])),))
        body_parts.append(Implies(atom, lit) if rng.random() < 0.5
                          else Implies(lit, atom))
    body = forall_block(("y",), conj(body_parts))
    return Forall("x", SoExists("S", 1, body))


def random_datalog_query(rng: random.Random, *, variant: str = "plain",
                         vocab: VocabularySpec | None = None,
                         lean: bool = False) -> DatalogQuery:
    """A validated program plus goal.  Retries until validation passes.

    ``lean`` restricts to unary and zero-ary head symbols and two rule
    variables, which keeps the Horn sentence read back from the program
    cheap to model-check by subset enumeration.
    """
    if vocab is None:
        vocab = rng.choice([EDGE, COLORED, POINTED])
    while True:
        try:
            query = _datalog_attempt(rng, variant, vocab, lean)
            validate_program(query.program)
            return query
        except Exception:
            continue


def _datalog_attempt(rng: random.Random, variant: str,
                     vocab: VocabularySpec, lean: bool) -> DatalogQuery:
    heads = {"A": 1}
    if not lean and rng.random() < 0.5:
        heads["B"] = 2
    if rng.random() < 0.3:
        heads["G"] = 0
    ext = list(vocab.relations)
    names = ("x", "y") if lean else ("x", "y", "z")
    rules = []
    for _ in range(rng.randint(2, 5)):
        head_sym = rng.choice(list(heads))
        head = Rel(head_sym, tuple(Var(rng.choice(names))
                                   for _ in range(heads[head_sym])))
        body = []
        for _ in range(rng.randrange(4)):
            roll = rng.random()
            if roll < 0.35:
                sym, arity = rng.choice(ext)
                atom = Rel(sym, tuple(_term(rng, names, vocab.constants)
                                      for _ in range(arity)))
                body.append(Not(atom) if rng.random() < 0.3 else atom)
            elif roll < 0.6:
                sym = rng.choice(list(heads))
                body.append(Rel(sym, tuple(Var(rng.choice(names))
                                           for _ in range(heads[sym]))))
            elif roll < 0.7:
                eq = Eq(Var(rng.choice(names)), _term(rng, names, vocab.constants))
                body.append(Not(eq) if rng.random() < 0.5 else eq)
            elif roll < 0.85 and variant in ("r", "star-r"):
                sym = rng.choice([s for s in heads if heads[s] >= 1] or ["A"])
                rest = tuple(Var(rng.choice(names)) for _ in range(heads[sym] - 1))
                body.append(UnivAtom(("u_",), sym, (Var("u_"),) + rest))
            elif variant in ("star", "star-r"):
                body.append(Cond(random_qf(rng, vocab, names, budget=3)))
        rules.append(DatalogRule(head, tuple(body)))
    goal = rng.choice(sorted({r.head.sym for r in rules}))
    prog = DatalogProgram(vocab, tuple(rules))
    return DatalogQuery(prog, goal)


def random_lfp_normal(rng: random.Random, *, vocab: VocabularySpec = EDGE) -> Formula:
    """A formula ``exists u [lfp phi](terms)`` with a positive body."""
    arity = rng.choice([1, 2])
    zs = tuple(f"z{i}" for i in range(1, arity + 1))
    base = random_qf(rng, vocab, zs, budget=2)
    shifted = tuple(Var(z) for z in zs[1:]) + (Var("w_"),)
    step = exists_block(("w_",), And((Rel("E", (Var(zs[-1]), Var("w_"))),
                                      Rel("Z", shifted))))
    body = disj((base, step))
    if rng.random() < 0.4:
        body = Or((body, Rel("Z", tuple(Var(z) for z in zs))))
    node = Lfp("Z", zs, body, tuple(Var(f"u{i}") for i in range(1, arity + 1)))
    out: Formula = node
    for i in range(arity, 0, -1):
        out = Exists(f"u{i}", out)
    return out


def random_sigma11(rng: random.Random, *, vocab: VocabularySpec = UNARY1) -> SoFormula:
    """An existential relation prefix over a forall-exists first-order part.

    The block lengths are capped so the witness relation the push-down
    rewrite introduces stays at most binary.
    """
    syms = ["P"] if rng.random() < 0.7 else ["P", "Q"]
    prefix = tuple(SoQuant(EXISTS, s, 1) for s in syms)
    if rng.random() < 0.8:
        xs: tuple[str, ...] = ("x1",)
        ys: tuple[str, ...] = ("y1",)
    else:
        xs = ("x1", "x2")
        ys = ()
    inner_vocab = vocab.extend([(s, 1) for s in syms])
    matrix = random_qf(rng, inner_vocab, xs + ys, budget=4)
    return SoFormula(prefix, forall_block(xs, exists_block(ys, matrix)))


def random_pi11(rng: random.Random, *, vocab: VocabularySpec = UNARY1) -> SoFormula:
    """A universal relation prefix over an exists-forall first-order part."""
    syms = ["P"] if rng.random() < 0.7 else ["P", "Q"]
    prefix = tuple(SoQuant(FORALL, s, 1) for s in syms)
    xs = ("x1",) if rng.random() < 0.8 else ()
    n_forall = rng.randint(1, 2)
    ys = tuple(f"y{i}" for i in range(1, n_forall + 1))
    inner_vocab = vocab.extend([(s, 1) for s in syms])
    matrix = random_qf(rng, inner_vocab, xs + ys, budget=4)
    return SoFormula(prefix, exists_block(xs, forall_block(ys, matrix)))


def random_stratified_core(rng: random.Random, *, vocab: VocabularySpec = UNARY1,
                           ) -> SoFormula:
    """A Horn sentence whose side conditions embed a lower Horn sentence."""
    inner = random_horn_sentence(rng, vocab=vocab)
    renamed = SoFormula(tuple(SoQuant(q.q, q.sym + "0", q.arity) for q in inner.prefix),
                        _rename_core(inner.core(), "0"))
    clauses = []
    for _ in range(rng.randint(2, 3)):
        alphas = tuple([Rel("W", (Var("x"),))] if rng.random() < 0.5 else [])
        betas = []
        if rng.random() < 0.8:
            betas.append(SoEmbed(renamed, negated=rng.random() < 0.5))
        if rng.random() < 0.5:
            betas.append(random_literal(rng, vocab, ("x",)))
        head = Rel("W", (Var("x"),)) if rng.random() < 0.7 else None
        clauses.append(HornClause(alphas, tuple(betas), head))
    prefix = (SoQuant(EXISTS, "W", 1),)
    return SoFormula(prefix, ClausalCore(("x",), tuple(clauses)))


def _rename_core(core: ClausalCore, suffix: str) -> ClausalCore:
    def fix_atom(a):
        if isinstance(a, UnivAtom):
            return UnivAtom(a.uvars, a.sym + suffix, a.args)
        return Rel(a.sym + suffix, a.args)

    clauses = []
    for c in core.clauses:
        clauses.append(HornClause(
            tuple(fix_atom(a) for a in c.alphas),
            c.betas,
            None if c.head is None else fix_atom(c.head)))
    return ClausalCore(core.uvars, tuple(clauses))
