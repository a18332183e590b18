"""Text formats: structures, vocabularies, formulas, rule programs, DIMACS.

One lexer serves every format.  Parsers report line and column on
errors.  Formatters emit canonical text that parses back to an equal
object, so emitted files are stable under a parse/format cycle.

Formula files and program files are self-contained: names denote
variables unless a leading ``const`` directive declares them, so no
out-of-band vocabulary is needed to tell the two apart.
"""

from __future__ import annotations

import re
from typing import Iterator, Sequence, Union

from .core import FiniteStructure, VocabularySpec
from .datalog import (
    Cond, DatalogProgram, DatalogQuery, DatalogRule, StratifiedProgram,
    StratifiedQuery,
)
from .syntax import (
    And, Bottom, Cst, Eq, Exists, Forall, Formula, Implies, Lfp, Not, Or, Rel,
    SLfp, SLfpComp, SoExists, SoForall, Term, Top, UnivAtom, ParseError, Var,
    constants_of,
)

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<arrow>->)
  | (?P<neq>!=)
  | (?P<rulesep>:-)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<punct>[(){}\[\];,.:=&|!@/<>-])
""", re.VERBOSE)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self) -> str:
        return f"{self.text!r}@{self.line}:{self.col}"


def _lex(text: str) -> list[Token]:
    out: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"line {line}, col {col}: stray character {text[pos]!r}")
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line += 1
            col = 1
        else:
            if kind not in ("ws", "comment"):
                k = {"arrow": "->", "neq": "!=", "rulesep": ":-",
                     "punct": tok}.get(kind, kind)
                out.append(Token(k, tok, line, col))
            col += len(tok)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Stream:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind:
            want = what or repr(kind)
            raise ParseError(
                f"line {t.line}, col {t.col}: expected {want}, found {t.text!r}")
        return self.next()

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def at_word(self, word: str) -> bool:
        return self.at("ident", word)

    def take_word(self, word: str) -> bool:
        if self.at_word(word):
            self.next()
            return True
        return False

    def fail(self, msg: str) -> ParseError:
        t = self.peek()
        return ParseError(f"line {t.line}, col {t.col}: {msg}")


# --- vocabularies and structures ------------------------------------------------

def _parse_vocab_block(s: _Stream) -> VocabularySpec:
    if not s.take_word("vocab"):
        raise s.fail("expected 'vocab'")
    s.expect("{")
    rels: list[tuple[str, int]] = []
    consts: list[str] = []
    while not s.at("}"):
        if s.take_word("rel"):
            name = s.expect("ident").text
            s.expect("/")
            arity = int(s.expect("int").text)
            rels.append((name, arity))
        elif s.take_word("const"):
            consts.append(s.expect("ident").text)
        else:
            raise s.fail("expected 'rel' or 'const'")
        s.expect(";")
    s.expect("}")
    return VocabularySpec(tuple(rels), tuple(consts))


def parse_vocab(text: str) -> VocabularySpec:
    s = _Stream(_lex(text))
    vocab = _parse_vocab_block(s)
    s.expect("eof", "end of file")
    return vocab


def format_vocab(vocab: VocabularySpec) -> str:
    parts = [f"rel {sym}/{arity};" for sym, arity in vocab.relations]
    parts += [f"const {c};" for c in vocab.constants]
    return "vocab { " + " ".join(parts) + " }" if parts else "vocab { }"


def parse_structure(text: str) -> FiniteStructure:
    s = _Stream(_lex(text))
    vocab = _parse_vocab_block(s)
    if not s.take_word("domain"):
        raise s.fail("expected 'domain'")
    size = int(s.expect("int").text)
    rels: dict[str, frozenset[tuple[int, ...]]] = {}
    consts: dict[str, int] = {}
    arity = vocab.arity_map()
    while not s.at("eof"):
        name = s.expect("ident").text
        s.expect("=")
        if name in arity:
            if arity[name] == 0:
                if s.take_word("true"):
                    rels[name] = frozenset({()})
                elif s.take_word("false"):
                    rels[name] = frozenset()
                else:
                    raise s.fail(f"zero-ary {name} needs 'true' or 'false'")
            else:
                s.expect("{")
                tuples = set()
                while not s.at("}"):
                    s.expect("(")
                    tup = [int(s.expect("int").text)]
                    while s.at(","):
                        s.next()
                        tup.append(int(s.expect("int").text))
                    s.expect(")")
                    tuples.add(tuple(tup))
                s.expect("}")
                rels[name] = frozenset(tuples)
        elif name in vocab.constants:
            consts[name] = int(s.expect("int").text)
        else:
            raise s.fail(f"{name} is not declared in the vocabulary")
    return FiniteStructure(vocab, size, rels, consts)


def format_structure(struct: FiniteStructure) -> str:
    lines = [format_vocab(struct.vocab), f"domain {struct.size}"]
    for sym, arity in struct.vocab.relations:
        if arity == 0:
            lines.append(f"{sym} = {'true' if () in struct.relation(sym) else 'false'}")
        else:
            body = " ".join("(" + ",".join(map(str, t)) + ")"
                            for t in sorted(struct.relation(sym)))
            lines.append(f"{sym} = {{ {body} }}" if body else f"{sym} = {{ }}")
    for c in struct.vocab.constants:
        lines.append(f"{c} = {struct.constants[c]}")
    return "\n".join(lines) + "\n"


# --- formulas --------------------------------------------------------------------

def _parse_const_directive(s: _Stream) -> frozenset[str]:
    names: set[str] = set()
    while s.at_word("const"):
        s.next()
        names.add(s.expect("ident").text)
        while s.at(","):
            s.next()
            names.add(s.expect("ident").text)
        s.expect(".")
    return frozenset(names)


def parse_formula(text: str) -> Formula:
    """One formula per file; a leading ``const`` directive names constants."""
    s = _Stream(_lex(text))
    consts = _parse_const_directive(s)
    phi = _formula(s, consts)
    s.expect("eof", "end of formula")
    return phi


def _term(s: _Stream, consts: frozenset[str]) -> Term:
    name = s.expect("ident", "a term").text
    return Cst(name) if name in consts else Var(name)


def _terms(s: _Stream, consts: frozenset[str]) -> tuple[Term, ...]:
    s.expect("(")
    if s.at(")"):
        s.next()
        return ()
    out = [_term(s, consts)]
    while s.at(","):
        s.next()
        out.append(_term(s, consts))
    s.expect(")")
    return tuple(out)


def _name_list(s: _Stream) -> tuple[str, ...]:
    names = [s.expect("ident").text]
    while s.at(","):
        s.next()
        names.append(s.expect("ident").text)
    return tuple(names)


def _formula(s: _Stream, consts: frozenset[str]) -> Formula:
    left = _disjunct(s, consts)
    if s.at("->"):
        s.next()
        return Implies(left, _formula(s, consts))
    return left


def _disjunct(s: _Stream, consts: frozenset[str]) -> Formula:
    parts = [_conjunct(s, consts)]
    while s.at("|"):
        s.next()
        parts.append(_conjunct(s, consts))
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def _conjunct(s: _Stream, consts: frozenset[str]) -> Formula:
    parts = [_unary(s, consts)]
    while s.at("&"):
        s.next()
        parts.append(_unary(s, consts))
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def _unary(s: _Stream, consts: frozenset[str]) -> Formula:
    if s.at("!"):
        s.next()
        return Not(_unary(s, consts))
    if s.at_word("forall") or s.at_word("exists"):
        # the name list is comma-continued so the body can start at a bare atom
        word = s.next().text
        names = [s.expect("ident").text]
        while s.at(","):
            s.next()
            names.append(s.expect("ident").text)
        body = _formula(s, consts)
        for n in reversed(names):
            body = Forall(n, body) if word == "forall" else Exists(n, body)
        return body
    if s.at_word("forall2") or s.at_word("exists2"):
        word = s.next().text
        sym = s.expect("ident").text
        s.expect("/")
        arity = int(s.expect("int").text)
        body = _formula(s, consts)
        return SoForall(sym, arity, body) if word == "forall2" else SoExists(sym, arity, body)
    if s.at_word("lfp"):
        return _lfp(s, consts)
    if s.at_word("slfp"):
        return _slfp(s, consts)
    return _atom(s, consts)


def _lfp(s: _Stream, consts: frozenset[str]) -> Formula:
    s.next()
    s.expect("[")
    rvar = s.expect("ident").text
    s.expect("/")
    arity = int(s.expect("int").text)
    s.expect(";")
    names = _name_list(s)
    if len(names) != arity:
        raise s.fail(f"{rvar}/{arity} binds {len(names)} tuple variables")
    s.expect("]")
    s.expect("{")
    body = _formula(s, consts)
    s.expect("}")
    args = _terms(s, consts)
    return Lfp(rvar, names, body, args)


def _slfp(s: _Stream, consts: frozenset[str]) -> Formula:
    s.next()
    s.expect("[")
    comps = []
    while True:
        rvar = s.expect("ident").text
        s.expect("/")
        arity = int(s.expect("int").text)
        s.expect(";")
        names = _name_list(s)
        if len(names) != arity:
            raise s.fail(f"{rvar}/{arity} binds {len(names)} tuple variables")
        s.expect(":")
        s.expect("{")
        body = _formula(s, consts)
        s.expect("}")
        comps.append(SLfpComp(rvar, names, body))
        if s.at(";"):
            s.next()
            continue
        break
    s.expect("@")
    goal = s.expect("ident").text
    s.expect("]")
    args = _terms(s, consts)
    return SLfp(tuple(comps), goal, args)


def _atom(s: _Stream, consts: frozenset[str]) -> Formula:
    if s.at("("):
        s.next()
        phi = _formula(s, consts)
        s.expect(")")
        if s.at("=") or s.at("!="):
            raise s.fail("equality applies to terms, not formulas")
        return phi
    if s.take_word("true"):
        return Top()
    if s.take_word("false"):
        return Bottom()
    tok = s.expect("ident", "an atom")
    name = tok.text
    if s.at("("):
        return Rel(name, _terms(s, consts))
    if s.at("=") or s.at("!="):
        op = s.next().kind
        lhs: Term = Cst(name) if name in consts else Var(name)
        rhs = _term(s, consts)
        eq = Eq(lhs, rhs)
        return eq if op == "=" else Not(eq)
    # a bare identifier is a zero-ary relation atom
    return Rel(name, ())


_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 0, 1, 2, 3


def _fmt_term(t: Term) -> str:
    return t.name


def _fmt(phi: Formula, prec: int) -> str:
    match phi:
        case Rel(sym, ()):
            return sym
        case Rel(sym, args):
            return f"{sym}({','.join(map(_fmt_term, args))})"
        case Eq(l, r):
            out = f"{_fmt_term(l)} = {_fmt_term(r)}"
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Not(Eq(l, r)):
            out = f"{_fmt_term(l)} != {_fmt_term(r)}"
        case Not(b):
            return "!" + _fmt(b, _PREC_UNARY)
        case And(parts):
            out = " & ".join(_fmt(p, _PREC_AND) for p in parts)
            return out if prec < _PREC_AND or len(parts) == 1 else f"({out})"
        case Or(parts):
            out = " | ".join(_fmt(p, _PREC_OR) for p in parts)
            return out if prec < _PREC_OR or len(parts) == 1 else f"({out})"
        case Implies(l, r):
            out = f"{_fmt(l, _PREC_OR)} -> {_fmt(r, _PREC_IMP)}"
        case Forall(v, b):
            out = f"forall {v} {_fmt(b, _PREC_IMP)}"
        case Exists(v, b):
            out = f"exists {v} {_fmt(b, _PREC_IMP)}"
        case SoForall(sym, arity, b):
            out = f"forall2 {sym}/{arity} {_fmt(b, _PREC_IMP)}"
        case SoExists(sym, arity, b):
            out = f"exists2 {sym}/{arity} {_fmt(b, _PREC_IMP)}"
        case Lfp(rvar, names, body, args):
            head = f"lfp[{rvar}/{len(names)}; {','.join(names)}]"
            out = head + "{ " + _fmt(body, _PREC_IMP) + " }"
            out += "(" + ",".join(map(_fmt_term, args)) + ")"
            return out
        case SLfp(comps, goal, args):
            chunks = [f"{c.rvar}/{len(c.vars)}; {','.join(c.vars)} : "
                      + "{ " + _fmt(c.body, _PREC_IMP) + " }" for c in comps]
            out = "slfp[" + " ; ".join(chunks) + f" @ {goal}]"
            out += "(" + ",".join(map(_fmt_term, args)) + ")"
            return out
        case _:
            raise ParseError(f"cannot format node {type(phi).__name__}")
    return out if prec == _PREC_IMP else f"({out})"


def format_formula(phi) -> str:
    """Canonical text; a ``const`` directive precedes when constants occur."""
    if hasattr(phi, "to_formula") and not isinstance(phi, Formula):
        phi = phi.to_formula()
    names = sorted(constants_of(phi))
    head = f"const {', '.join(names)}.\n" if names else ""
    return head + _fmt(phi, _PREC_IMP) + "\n"


# --- rule programs ----------------------------------------------------------------

def parse_program(text: str) -> Union[DatalogQuery, StratifiedQuery]:
    """Directives, then rules; ``stratum.`` lines split a stratified chain."""
    s = _Stream(_lex(text))
    rels: list[tuple[str, int]] = []
    consts: list[str] = []
    variant: str | None = None
    goal: str | None = None
    while True:
        if s.at_word("rel") and s.peek(1).kind == "ident":
            s.next()
            name = s.expect("ident").text
            s.expect("/")
            rels.append((name, int(s.expect("int").text)))
            s.expect(".")
        elif s.at_word("const") and s.peek(1).kind == "ident":
            s.next()
            consts.append(s.expect("ident").text)
            while s.at(","):
                s.next()
                consts.append(s.expect("ident").text)
            s.expect(".")
        elif s.at_word("variant"):
            s.next()
            variant = s.expect("ident").text
            if s.at("-"):
                s.next()
                variant += "-" + s.expect("ident").text
            s.expect(".")
        elif s.at_word("goal") and s.peek(1).kind == "ident":
            s.next()
            goal = s.expect("ident").text
            s.expect(".")
        else:
            break
    cset = frozenset(consts)
    strata: list[list[DatalogRule]] = [[]]
    while not s.at("eof"):
        if s.at_word("stratum") and s.peek(1).kind == ".":
            s.next()
            s.next()
            strata.append([])
            continue
        strata[-1].append(_rule(s, cset))
    if goal is None:
        raise s.fail("program needs a 'goal' directive")
    vocab = VocabularySpec(tuple(rels), tuple(consts))
    if len(strata) == 1:
        return DatalogQuery(DatalogProgram(vocab, tuple(strata[0]), variant), goal)
    progs = []
    cur = vocab
    for rules in strata:
        p = DatalogProgram(cur, tuple(rules), variant)
        progs.append(p)
        cur = cur.extend(sorted(p.intentional().items()))
    return StratifiedQuery(StratifiedProgram(tuple(progs)), goal)


def _rule(s: _Stream, consts: frozenset[str]) -> DatalogRule:
    head_tok = s.expect("ident", "a rule head")
    head = Rel(head_tok.text, _terms(s, consts) if s.at("(") else ())
    if s.at("."):
        s.next()
        return DatalogRule(head, ())
    s.expect(":-")
    items = [_body_item(s, consts)]
    while s.at(","):
        s.next()
        items.append(_body_item(s, consts))
    s.expect(".")
    return DatalogRule(head, tuple(items))


def _body_item(s: _Stream, consts: frozenset[str]):
    if s.at("{"):
        s.next()
        f = _formula(s, consts)
        s.expect("}")
        return Cond(f)
    if s.at_word("all"):
        s.next()
        uvars = [s.expect("ident").text]
        while s.at("ident") and not s.at(":"):
            uvars.append(s.expect("ident").text)
        s.expect(":")
        sym = s.expect("ident").text
        args = _terms(s, consts) if s.at("(") else ()
        return UnivAtom(tuple(uvars), sym, args)
    if s.at("!"):
        s.next()
        tok = s.expect("ident", "an atom")
        if s.at("("):
            return Not(Rel(tok.text, _terms(s, consts)))
        return Not(Rel(tok.text, ()))
    tok = s.expect("ident", "a body item")
    name = tok.text
    if s.at("("):
        return Rel(name, _terms(s, consts))
    if s.at("=") or s.at("!="):
        op = s.next().kind
        lhs: Term = Cst(name) if name in consts else Var(name)
        rhs = _term(s, consts)
        eq = Eq(lhs, rhs)
        return eq if op == "=" else Not(eq)
    return Rel(name, ())


def _fmt_atom(sym: str, args: tuple[Term, ...]) -> str:
    if not args:
        return sym
    return f"{sym}({','.join(map(_fmt_term, args))})"


def _fmt_item(item) -> str:
    match item:
        case Cond(f):
            return "{ " + _fmt(f, _PREC_IMP) + " }"
        case UnivAtom(uvars, sym, args):
            return f"all {' '.join(uvars)} : {_fmt_atom(sym, args)}"
        case Rel(sym, args):
            return _fmt_atom(sym, args)
        case Not(Rel(sym, args)):
            return "!" + _fmt_atom(sym, args)
        case Eq(l, r):
            return f"{_fmt_term(l)} = {_fmt_term(r)}"
        case Not(Eq(l, r)):
            return f"{_fmt_term(l)} != {_fmt_term(r)}"
    raise ParseError(f"cannot format body item {item!r}")


def format_program(q: Union[DatalogQuery, StratifiedQuery]) -> str:
    if isinstance(q, DatalogQuery):
        base = q.program.vocab
        blocks: tuple[tuple[DatalogRule, ...], ...] = (q.program.rules,)
        variant = q.program.variant
    else:
        base = q.program.strata[0].vocab
        blocks = tuple(p.rules for p in q.program.strata)
        variant = q.program.strata[0].variant
    lines = [f"rel {sym}/{arity}." for sym, arity in base.relations]
    if base.constants:
        lines.append("const " + ", ".join(base.constants) + ".")
    if variant is not None:
        lines.append(f"variant {variant}.")
    lines.append(f"goal {q.goal}.")
    for k, rules in enumerate(blocks):
        if k:
            lines.append("stratum.")
        for r in rules:
            head = _fmt_atom(r.head.sym, r.head.args)
            if r.body:
                lines.append(f"{head} :- {', '.join(_fmt_item(i) for i in r.body)}.")
            else:
                lines.append(f"{head}.")
    return "\n".join(lines) + "\n"


# --- DIMACS ----------------------------------------------------------------------

def parse_dimacs(text: str) -> tuple[tuple[int, ...], ...]:
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    header = None
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {ln}, col 1: bad DIMACS header {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {ln}, col 1: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    if header is not None and header[1] != len(clauses):
        raise ParseError(f"header promises {header[1]} clauses, found {len(clauses)}")
    return tuple(clauses)


def format_dimacs(clauses: Sequence[Sequence[int]]) -> str:
    nvars = max((abs(l) for cl in clauses for l in cl), default=0)
    lines = [f"p cnf {nvars} {len(clauses)}"]
    lines += [" ".join(map(str, cl)) + " 0" for cl in clauses]
    return "\n".join(lines) + "\n"


# --- sniffing --------------------------------------------------------------------

def parse_artifact(text: str):
    """Program if the text carries a goal directive or a rule; else formula."""
    if re.search(r"^\s*goal\s", text, re.MULTILINE) or ":-" in text:
        return parse_program(text)
    return parse_formula(text)
