"""Shared fixtures and reference implementations.

The oracles below recompute answers with deliberately different
algorithms (plain recursion, chaotic iteration, graph search, truth
tables), so agreement with the package is evidence, not tautology.
"""

from __future__ import annotations

import itertools
import random
import zlib

import pytest
from hypothesis import strategies as st

from hornlab.core import FiniteStructure, VocabularySpec
from hornlab.datalog import Cond, DatalogProgram
from hornlab.second_order import ClausalCore, EXISTS, SoFormula
from hornlab.syntax import (
    And, Bottom, Cst, Eq, Exists, Forall, Implies, Lfp, Not, Or, Rel, SLfp,
    SoExists, SoForall, Top, UnivAtom, Var,
)

# --- first-order evaluation by plain recursion -----------------------------------


def oracle_term(t, struct, env):
    if isinstance(t, Var):
        return env[t.name]
    return struct.constants[t.name]


def oracle_fo(phi, struct, env=None, rels=None):
    env = env or {}
    rels = rels or {}

    def rel(sym):
        if sym in rels:
            return rels[sym]
        return struct.relations[sym]

    def go(f, env):
        if isinstance(f, Rel):
            return tuple(oracle_term(t, struct, env) for t in f.args) in rel(f.sym)
        if isinstance(f, Eq):
            return oracle_term(f.lhs, struct, env) == oracle_term(f.rhs, struct, env)
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Not):
            return not go(f.body, env)
        if isinstance(f, And):
            return all(go(p, env) for p in f.parts)
        if isinstance(f, Or):
            return any(go(p, env) for p in f.parts)
        if isinstance(f, Implies):
            return (not go(f.lhs, env)) or go(f.rhs, env)
        if isinstance(f, Forall):
            return all(go(f.body, {**env, f.var: e}) for e in range(struct.size))
        if isinstance(f, Exists):
            return any(go(f.body, {**env, f.var: e}) for e in range(struct.size))
        raise AssertionError(f"oracle cannot evaluate {type(f).__name__}")

    return go(phi, dict(env))


def oracle_lfp_pairs(struct, base_sym="E"):
    """Transitive closure of a binary relation by graph search."""
    edges = struct.relations[base_sym]
    out = set()
    for start in range(struct.size):
        seen = set()
        frontier = [v for (u, v) in edges if u == start]
        while frontier:
            v = frontier.pop()
            if v in seen:
                continue
            seen.add(v)
            frontier.extend(w for (u, w) in edges if u == v)
        out.update((start, v) for v in seen)
    return out


def oracle_fixpoint(comps, struct, env=None):
    """Chaotic iteration for a fixed-point system; comps is (name, vars, body)."""
    env = dict(env or {})
    cur = {name: frozenset() for name, _, _ in comps}
    while True:
        nxt = {}
        for name, vs, body in comps:
            nxt[name] = frozenset(
                tup for tup in itertools.product(range(struct.size), repeat=len(vs))
                if oracle_fo(body, struct, {**env, **dict(zip(vs, tup))}, cur))
        if nxt == cur:
            return cur
        cur = nxt


def oracle_lfp_formula(phi, struct, env=None):
    """Evaluate Exists* over one Lfp or SLfp node, oracle-style."""
    env = dict(env or {})
    prefix = []
    node = phi
    while isinstance(node, Exists):
        prefix.append(node.var)
        node = node.body

    def check(env):
        if isinstance(node, Lfp):
            comps = ((node.rvar, node.vars, node.body),)
            goal = node.rvar
        else:
            comps = tuple((c.rvar, c.vars, c.body) for c in node.comps)
            goal = node.goal
        fix = oracle_fixpoint(comps, struct, env)
        pt = tuple(oracle_term(t, struct, env) for t in node.args)
        return pt in fix[goal]

    def quantify(i, env):
        if i == len(prefix):
            return check(env)
        return any(quantify(i + 1, {**env, prefix[i]: e})
                   for e in range(struct.size))

    return quantify(0, env)


# --- rule programs by chaotic iteration -------------------------------------------


def oracle_datalog(prog: DatalogProgram, struct: FiniteStructure):
    """Least model by grounding every rule over the whole domain each round."""
    intent = {}
    for r in prog.rules:
        intent[r.head.sym] = len(r.head.args)
    db = {s: set() for s in intent}

    def term(t, env):
        return env[t.name] if isinstance(t, Var) else struct.constants[t.name]

    def item_holds(item, env):
        if isinstance(item, Cond):
            return oracle_fo(item.formula, struct, env)
        if isinstance(item, UnivAtom):
            uv = list(item.uvars)
            for tup in itertools.product(range(struct.size), repeat=len(uv)):
                inst = {**env, **dict(zip(uv, tup))}
                args = tuple(term(t, inst) for t in item.args)
                if item.sym in db:
                    if args not in db[item.sym]:
                        return False
                elif args not in struct.relations[item.sym]:
                    return False
            return True
        if isinstance(item, Not):
            a = item.body
            if isinstance(a, Eq):
                return term(a.lhs, env) != term(a.rhs, env)
            args = tuple(term(t, env) for t in a.args)
            return args not in struct.relations[a.sym]
        if isinstance(item, Eq):
            return term(item.lhs, env) == term(item.rhs, env)
        args = tuple(term(t, env) for t in item.args)
        if item.sym in db:
            return args in db[item.sym]
        return args in struct.relations[item.sym]

    def rule_vars(rule):
        vs = set()
        for t in rule.head.args:
            if isinstance(t, Var):
                vs.add(t.name)
        for item in rule.body:
            if isinstance(item, Cond):
                from hornlab.syntax import free_vars
                vs |= set(free_vars(item.formula))
            elif isinstance(item, UnivAtom):
                vs |= {t.name for t in item.args
                       if isinstance(t, Var) and t.name not in item.uvars}
            elif isinstance(item, Not):
                inner = item.body
                ts = (inner.lhs, inner.rhs) if isinstance(inner, Eq) else inner.args
                vs |= {t.name for t in ts if isinstance(t, Var)}
            elif isinstance(item, Eq):
                vs |= {t.name for t in (item.lhs, item.rhs) if isinstance(t, Var)}
            else:
                vs |= {t.name for t in item.args if isinstance(t, Var)}
        return sorted(vs)

    changed = True
    while changed:
        changed = False
        for rule in prog.rules:
            vs = rule_vars(rule)
            for tup in itertools.product(range(struct.size), repeat=len(vs)):
                env = dict(zip(vs, tup))
                if all(item_holds(i, env) for i in rule.body):
                    fact = tuple(term(t, env) for t in rule.head.args)
                    if fact not in db[rule.head.sym]:
                        db[rule.head.sym].add(fact)
                        changed = True
    return {s: frozenset(ts) for s, ts in db.items()}


# --- Horn sentences by ground least model ------------------------------------------


def oracle_horn_sentence(sof: SoFormula, struct: FiniteStructure) -> bool:
    """Truth of an existential Horn sentence via its ground least model."""
    assert all(q.q == EXISTS for q in sof.prefix)
    core: ClausalCore = sof.body
    assert isinstance(core, ClausalCore)
    qsyms = {q.sym for q in sof.prefix}

    def term(t, env):
        return env[t.name] if isinstance(t, Var) else struct.constants[t.name]

    db = {q.sym: set() for q in sof.prefix}
    ground = []
    for binding in itertools.product(range(struct.size), repeat=len(core.uvars)):
        env = dict(zip(core.uvars, binding))
        for cl in ground_ok(core, env, struct, qsyms, term):
            ground.append(cl)

    changed = True
    while changed:
        changed = False
        for body_atoms, univs, head in ground:
            if not all(a in db[s] for s, a in body_atoms):
                continue
            if not all(all(tup in db[s] for tup in insts) for s, insts in univs):
                continue
            if head is None:
                continue
            s, a = head
            if a not in db[s]:
                db[s].add(a)
                changed = True
    for body_atoms, univs, head in ground:
        if head is None:
            if (all(a in db[s] for s, a in body_atoms)
                    and all(all(tup in db[s] for tup in insts) for s, insts in univs)):
                return False
    return True


def ground_ok(core, env, struct, qsyms, term):
    """Ground one clause binding; drop it when a side condition fails."""
    for cl in core.clauses:
        atoms = []
        univs = []
        ok = True
        for b in cl.betas:
            if not oracle_fo(b, struct, env):
                ok = False
                break
        if not ok:
            continue
        for a in cl.alphas:
            if isinstance(a, UnivAtom):
                insts = []
                for tup in itertools.product(range(struct.size), repeat=len(a.uvars)):
                    inst = {**env, **dict(zip(a.uvars, tup))}
                    insts.append(tuple(term(t, inst) for t in a.args))
                univs.append((a.sym, insts))
            else:
                atoms.append((a.sym, tuple(term(t, env) for t in a.args)))
        head = None
        if cl.head is not None:
            head = (cl.head.sym, tuple(term(t, env) for t in cl.head.args))
        yield (atoms, univs, head)


# --- propositional CNF by truth table ----------------------------------------------


def brute_sat(clauses) -> bool:
    nvars = max((abs(l) for cl in clauses for l in cl), default=0)
    for bits in itertools.product((False, True), repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in clauses):
            return True
    return not clauses


# --- fixtures and strategies --------------------------------------------------------

EDGE = VocabularySpec((("E", 2),), ())


@pytest.fixture
def path3():
    return FiniteStructure(
        VocabularySpec((("E", 2),), ("s", "t")), 3,
        {"E": frozenset({(0, 1), (1, 2)})}, {"s": 0, "t": 2})


@pytest.fixture
def triangle():
    return FiniteStructure(EDGE, 3, {"E": frozenset({(0, 1), (1, 2), (2, 0)})})


def seeds(label: str, k: int = 8) -> list[int]:
    """Stable seed lists for parametrized sweeps, one stream per label."""
    base = zlib.crc32(label.encode()) & 0xFFFF
    return [base * 1000 + i for i in range(k)]


@st.composite
def structures(draw, vocab=EDGE, max_size=3):
    n = draw(st.integers(1, max_size))
    rels = {}
    for sym, ar in vocab.relations:
        universe = list(itertools.product(range(n), repeat=ar))
        rels[sym] = frozenset(draw(st.sets(st.sampled_from(universe))) if universe
                              else set())
    consts = {c: draw(st.integers(0, n - 1)) for c in vocab.constants}
    return FiniteStructure(vocab, n, rels, consts)


@st.composite
def qf_formulas(draw, vocab=EDGE, names=("x", "y"), depth=2):
    if depth == 0 or draw(st.booleans()):
        sym, ar = draw(st.sampled_from(vocab.relations))
        args = tuple(Var(draw(st.sampled_from(names))) for _ in range(ar))
        atom = Rel(sym, args)
        if draw(st.booleans()):
            return Not(atom)
        return atom
    kind = draw(st.sampled_from(("and", "or", "implies", "not")))
    if kind == "not":
        return Not(draw(qf_formulas(vocab=vocab, names=names, depth=depth - 1)))
    a = draw(qf_formulas(vocab=vocab, names=names, depth=depth - 1))
    b = draw(qf_formulas(vocab=vocab, names=names, depth=depth - 1))
    if kind == "and":
        return And((a, b))
    if kind == "or":
        return Or((a, b))
    return Implies(a, b)


@st.composite
def fo_sentences(draw, vocab=EDGE, depth=2):
    names = ("x", "y")
    body = draw(qf_formulas(vocab=vocab, names=names, depth=depth))
    for v in reversed(names):
        body = Forall(v, body) if draw(st.booleans()) else Exists(v, body)
    return body
