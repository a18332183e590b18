"""Command line front end.

Exit codes: 0 success, 1 property violation or counterexample, 2 usage
or input error, 3 budget exceeded.  ``--machine`` switches stdout to a
line-oriented key=value report with a versioned header; newlines inside
values are escaped as ``\\n``.  ``HORNLAB_BUDGET`` caps relation
enumeration wherever a budget applies and a flag does not override it.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import lab, textio
from .core import (
    VocabularySpec, cnf_to_structure, eval_fo,
)
from .datalog import (
    DatalogQuery, StratifiedQuery, eval_datalog, eval_stratified,
    validate_program,
)
from .lfp import eval_lfp, require_positive
from .second_order import classify_fragment, eval_so_bruteforce
from .syntax import (
    And, Bottom, BudgetExceeded, Cst, Eq, Exists, Forall, Formula, HornlabError,
    Implies, Lfp, Not, Or, Rel, SLfp, SoExists, SoForall, Top, free_vars,
    constants_of,
)
from . import transforms

DEFAULT_BUDGET = 65536

_STATUS = {0: "ok", 1: "violation", 2: "error", 3: "budget"}


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    report: str
    machine_report: str
    machine: bool = False


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); keep it catchable
        raise _UsageError(message)


def _esc(v) -> str:
    return str(v).replace("\\", "\\\\").replace("\n", "\\n")


def _machine_text(command: str, code: int, pairs: list[tuple[str, object]]) -> str:
    lines = ["hornlab-report 1", f"command={command}", f"status={_STATUS[code]}"]
    lines += [f"{k}={_esc(v)}" for k, v in pairs]
    return "\n".join(lines)


def _budget(ns) -> int:
    flag = getattr(ns, "budget", None)
    if flag is not None:
        return flag
    env = os.environ.get("HORNLAB_BUDGET")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _UsageError(f"HORNLAB_BUDGET={env!r} is not an integer") from None
    return DEFAULT_BUDGET


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _walk(phi: Formula):
    yield phi
    match phi:
        case Not(b) | Forall(_, b) | Exists(_, b):
            yield from _walk(b)
        case SoExists(_, _, b) | SoForall(_, _, b):
            yield from _walk(b)
        case And(parts) | Or(parts):
            for p in parts:
                yield from _walk(p)
        case Implies(l, r):
            yield from _walk(l)
            yield from _walk(r)
        case Lfp(_, _, b, _):
            yield from _walk(b)
        case SLfp(comps, _, _):
            for c in comps:
                yield from _walk(c.body)


def _has_so(phi: Formula) -> bool:
    return any(isinstance(f, (SoExists, SoForall)) for f in _walk(phi))


def _has_fixpoint(phi: Formula) -> bool:
    return any(isinstance(f, (Lfp, SLfp)) for f in _walk(phi))


def infer_vocab(phi: Formula) -> VocabularySpec:
    """Extensional vocabulary of a formula: unbound relation symbols and
    constants, arities read off the atoms."""
    if not isinstance(phi, Formula):
        phi = phi.to_formula()
    bound: set[str] = set()
    for f in _walk(phi):
        match f:
            case SoExists(sym, _, _) | SoForall(sym, _, _):
                bound.add(sym)
            case Lfp(rvar, _, _, _):
                bound.add(rvar)
            case SLfp(comps, _, _):
                bound.update(c.rvar for c in comps)
    rels: dict[str, int] = {}
    for f in _walk(phi):
        if isinstance(f, Rel) and f.sym not in bound:
            prev = rels.setdefault(f.sym, len(f.args))
            if prev != len(f.args):
                raise HornlabError(
                    f"symbol {f.sym} used with arities {prev} and {len(f.args)}")
    return VocabularySpec(tuple(sorted(rels.items())),
                          tuple(sorted(constants_of(phi))))


def _fmt_tuples(tuples) -> str:
    if not tuples:
        return "{ }"
    return "{ " + " ".join("(" + ",".join(map(str, t)) + ")"
                           for t in sorted(tuples)) + " }"


# --- subcommand handlers --------------------------------------------------------
# each returns (exit_code, human_lines, machine_pairs)


def _cmd_parse(ns):
    text = _read(ns.file)
    if ns.kind == "datalog":
        q = textio.parse_program(text)
        progs = (q.program,) if isinstance(q, DatalogQuery) else q.program.strata
        lines = [f"kind: datalog ({len(progs)} stratum)" if len(progs) == 1
                 else f"kind: datalog ({len(progs)} strata)"]
        pairs: list[tuple[str, object]] = [("kind", "datalog"),
                                           ("strata", len(progs)), ("goal", q.goal)]
        for i, p in enumerate(progs):
            rep = validate_program(p)
            tag = f"stratum {i}: " if len(progs) > 1 else ""
            lines.append(f"{tag}variant {rep.variant}, {rep.rule_count} rules, "
                         f"intentional {', '.join(s for s, _ in rep.intentional)}")
            pairs.append((f"variant{i}" if len(progs) > 1 else "variant", rep.variant))
        lines.append(f"goal: {q.goal}")
        return 0, lines, pairs
    phi = textio.parse_formula(text)
    if ns.kind == "fo":
        if _has_so(phi):
            raise HornlabError("relation quantifiers present; use --kind so")
        if _has_fixpoint(phi):
            raise HornlabError("fixed-point operator present; use --kind lfp")
        fv = sorted(free_vars(phi))
        lines = ["kind: fo", f"free: {', '.join(fv) if fv else '(sentence)'}"]
        return 0, lines, [("kind", "fo"), ("free", ",".join(fv))]
    if ns.kind == "lfp":
        if not _has_fixpoint(phi):
            raise HornlabError("no fixed-point operator; use --kind fo")
        require_positive(phi)
        fv = sorted(free_vars(phi))
        lines = ["kind: lfp", "positivity: ok",
                 f"free: {', '.join(fv) if fv else '(sentence)'}"]
        return 0, lines, [("kind", "lfp"), ("free", ",".join(fv))]
    tags = sorted(str(t) for t in classify_fragment(phi))
    lines = ["kind: so", f"fragments: {', '.join(tags)}"]
    return 0, lines, [("kind", "so"), ("fragments", ",".join(tags))]


def _parse_assign(spec: str) -> dict[str, int]:
    env: dict[str, int] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, val = part.partition("=")
        try:
            env[name.strip()] = int(val)
        except ValueError:
            raise _UsageError(f"bad assignment {part!r}; want name=int") from None
    return env


def _cmd_eval(ns):
    phi = textio.parse_formula(_read(ns.formula))
    struct = textio.parse_structure(_read(ns.structure))
    env = _parse_assign(ns.assign) if ns.assign else {}
    if _has_so(phi):
        value = eval_so_bruteforce(phi, struct, env, budget=_budget(ns))
    elif _has_fixpoint(phi):
        value = eval_lfp(phi, struct, env)
    else:
        value = eval_fo(phi, struct, env)
    word = "true" if value else "false"
    return 0, [f"value: {word}"], [("value", word)]


def _cmd_run_datalog(ns):
    q = textio.parse_program(_read(ns.program))
    struct = textio.parse_structure(_read(ns.structure))
    lines: list[str] = []
    pairs: list[tuple[str, object]] = [("goal", q.goal)]
    def _show_trace(trace, label=""):
        for s in range(1, len(trace.stages)):
            for sym in sorted(trace.stages[s]):
                if trace.stages[s][sym] != trace.stages[s - 1][sym]:
                    lines.append(f"{label}stage {s}: {sym} = "
                                 f"{_fmt_tuples(trace.stages[s][sym])}")

    if isinstance(q, StratifiedQuery):
        if ns.trace_stages:
            result, traces = eval_stratified(q.program, struct, trace=True,
                                             engine=ns.engine)
            for k, trace in enumerate(traces):
                _show_trace(trace, f"stratum {k} ")
            pairs.append(("rounds", sum(t.rounds for t in traces)))
        else:
            result = eval_stratified(q.program, struct, engine=ns.engine)
        intent: dict[str, int] = {}
        for p in q.program.strata:
            intent.update(p.intentional())
    else:
        if ns.trace_stages:
            result, trace = eval_datalog(q.program, struct, trace=True,
                                         engine=ns.engine)
            _show_trace(trace)
            pairs.append(("rounds", trace.rounds))
        else:
            result = eval_datalog(q.program, struct, engine=ns.engine)
        intent = q.program.intentional()
    for sym in sorted(intent):
        if intent[sym] == 0:
            lines.append(f"{sym} = {'true' if () in result.relation(sym) else 'false'}")
        else:
            lines.append(f"{sym} = {_fmt_tuples(result.relation(sym))}")
    goal_rel = result.relation(q.goal)
    if intent.get(q.goal, 1) == 0:
        pairs.append(("value", "true" if () in goal_rel else "false"))
    else:
        pairs.append(("tuples", len(goal_rel)))
    return 0, lines, pairs


_RULES = {
    "lemma1": ("formula", lambda phi, vocab: transforms.swap_forall_exists(phi)),
    "prop1": ("formula", lambda phi, vocab: transforms.to_existential_fragment(phi)),
    "fo2dlr": ("formula", lambda phi, vocab: transforms.fo_to_datalog_r(phi, vocab)),
    "star2r": ("program", lambda q, vocab: transforms.datalog_star_to_r(q)),
    "horn2dl": ("formula", lambda phi, vocab: transforms.so_horn_to_datalog(phi, vocab)),
    "dl2horn": ("program", lambda q, vocab: transforms.datalog_to_so_horn(q)),
    "dlr2lfp": ("program", lambda q, vocab: transforms.datalog_r_to_slfp(q)),
    "lfp2dlr": ("formula", lambda phi, vocab: transforms.lfp_normal_to_datalog_r(phi, vocab)),
    "fo2sdl": ("formula", lambda phi, vocab: transforms.fo_to_s_datalog(phi, vocab)),
    "sdl-horn": ("formula", lambda phi, vocab: transforms.stratified_horn_datalog(phi, vocab)),
    "sig11": ("formula", lambda phi, vocab: transforms.sigma11_push_exists(phi)),
    "pi11-ehorn": ("formula", lambda phi, vocab: transforms.pi11_to_ehorn_r(phi)),
}


def _cmd_translate(ns):
    want, fn = _RULES[ns.rule]
    obj = textio.parse_artifact(_read(getattr(ns, "in")))
    is_prog = isinstance(obj, (DatalogQuery, StratifiedQuery))
    if want == "program" and not is_prog:
        raise HornlabError(f"rule {ns.rule} expects a rule program")
    if want == "formula" and is_prog:
        raise HornlabError(f"rule {ns.rule} expects a formula")
    vocab = infer_vocab(obj) if want == "formula" else None
    out_obj, rep = fn(obj, vocab)
    if isinstance(out_obj, (DatalogQuery, StratifiedQuery)):
        text = textio.format_program(out_obj)
    else:
        text = textio.format_formula(out_obj)
    lines = [f"rule: {rep.rule}", f"contract: {rep.contract}"]
    pairs: list[tuple[str, object]] = [("rule", rep.rule), ("contract", rep.contract)]
    if rep.fragment:
        lines.append(f"fragment: {rep.fragment}")
        pairs.append(("fragment", rep.fragment))
    if rep.fresh_symbols:
        lines.append(f"fresh: {', '.join(rep.fresh_symbols)}")
        pairs.append(("fresh", ",".join(rep.fresh_symbols)))
    if rep.query_vars is not None:
        lines.append(f"query-vars: {', '.join(rep.query_vars)}")
        pairs.append(("query_vars", ",".join(rep.query_vars)))
    for step in rep.steps:
        lines.append(f"  - {step}")
    if ns.out:
        Path(ns.out).write_text(text, encoding="utf-8")
        lines.append(f"wrote {ns.out}")
        pairs.append(("out", ns.out))
    else:
        lines.append(text.rstrip("\n"))
        pairs.append(("output", text.rstrip("\n")))
    return 0, lines, pairs


def _verdict_output(v, extra_pairs=()):
    lines = [f"verdict: {v.status}", f"checked: {v.checked}"]
    for n, k in v.by_size:
        lines.append(f"  size {n}: {k}")
    if v.skipped:
        lines.append(f"skipped: {v.skipped} (budget)")
    pairs = list(extra_pairs) + [("verdict", v.status), ("checked", v.checked),
                                 ("skipped", v.skipped)]
    code = 0
    if v.witness is not None:
        w = v.witness
        code = 1
        lines.append(f"left={w.left} right={w.right} at point "
                     f"{w.point if w.point else '()'} in:")
        lines.append(textio.format_structure(w.structure).rstrip("\n"))
        pairs += [("witness_size", w.structure.size),
                  ("witness_point", ",".join(map(str, w.point))),
                  ("left", w.left), ("right", w.right),
                  ("witness", textio.format_structure(w.structure))]
    return code, lines, pairs


def _cmd_equiv(ns):
    a = textio.parse_artifact(_read(ns.a))
    b = textio.parse_artifact(_read(ns.b))
    vocab = textio.parse_vocab(_read(ns.vocab))
    mode = "sample" if ns.samples is not None else "exhaustive"
    v = lab.check_equiv(a, b, vocab, max_n=ns.max_size, mode=mode,
                        budget=_budget(ns), samples=ns.samples or 25,
                        seed=ns.seed)
    return _verdict_output(v, [("mode", mode), ("max_size", ns.max_size)])


def _cmd_closure(ns):
    x = textio.parse_artifact(_read(getattr(ns, "in")))
    if ns.vocab:
        vocab = textio.parse_vocab(_read(ns.vocab))
    elif isinstance(x, DatalogQuery):
        vocab = x.program.vocab
    elif isinstance(x, StratifiedQuery):
        vocab = x.program.strata[0].vocab
    else:
        vocab = infer_vocab(x)
    direction = {"sub": "substructure", "ext": "extension"}[ns.direction]
    v = lab.check_closure(x, direction, vocab=vocab, trials=ns.trials,
                          seed=ns.seed, max_n=ns.max_size, budget=_budget(ns))
    return _verdict_output(v, [("direction", direction)])


def _cmd_cnf_encode(ns):
    clauses = textio.parse_dimacs(_read(ns.dimacs))
    struct = cnf_to_structure(clauses)
    text = textio.format_structure(struct)
    nvars = max((abs(l) for cl in clauses for l in cl), default=0)
    lines = [f"clauses: {len(clauses)}", f"variables: {nvars}",
             f"domain: {struct.size}"]
    pairs = [("clauses", len(clauses)), ("variables", nvars),
             ("domain", struct.size)]
    if ns.out:
        Path(ns.out).write_text(text, encoding="utf-8")
        lines.append(f"wrote {ns.out}")
        pairs.append(("out", ns.out))
    else:
        lines.append(text.rstrip("\n"))
        pairs.append(("output", text))
    return 0, lines, pairs


def _cmd_corpus(ns):
    if ns.emit:
        item = lab.corpus_item(ns.emit)
        if item.kind == "cnf":
            text = textio.format_dimacs(item.payload)
        elif item.kind in ("datalog", "s-datalog"):
            text = textio.format_program(item.payload)
        else:
            text = textio.format_formula(item.payload)
        return 0, [text.rstrip("\n")], [("name", item.name), ("kind", item.kind),
                                        ("output", text)]
    items = lab.corpus()
    lines = []
    for it in items:
        lines.append(f"{it.name:<14} {it.kind:<12} [{', '.join(it.tags)}]  {it.note}")
    return 0, lines, [("count", len(items)),
                      ("names", ",".join(it.name for it in items))]


def _build_parser() -> _Parser:
    p = _Parser(prog="hornlab", description=__doc__.splitlines()[0])
    p.add_argument("--machine", action="store_true",
                   help="key=value report on stdout")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and classify a file")
    sp.add_argument("--kind", choices=("fo", "so", "datalog", "lfp"), required=True)
    sp.add_argument("file")

    sp = sub.add_parser("eval", help="evaluate a formula on a structure")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--structure", required=True)
    sp.add_argument("--assign", help="x=0,y=2")
    sp.add_argument("--budget", type=int)

    sp = sub.add_parser("run-datalog", help="run a program to its fixed point")
    sp.add_argument("--program", required=True)
    sp.add_argument("--structure", required=True)
    sp.add_argument("--trace-stages", action="store_true")
    sp.add_argument("--engine", choices=("naive", "seminaive"), default="naive")

    sp = sub.add_parser("translate", help="apply a named construction")
    sp.add_argument("--rule", choices=tuple(_RULES), required=True)
    sp.add_argument("--in", required=True)
    sp.add_argument("--out")

    sp = sub.add_parser("equiv", help="compare two checkables over all small structures")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--vocab", required=True)
    sp.add_argument("--max-size", type=int, required=True)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int)

    sp = sub.add_parser("closure", help="test substructure or extension closure")
    sp.add_argument("--in", required=True)
    sp.add_argument("--direction", choices=("sub", "ext"), required=True)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-size", type=int, default=4)
    sp.add_argument("--vocab")
    sp.add_argument("--budget", type=int)

    sp = sub.add_parser("cnf-encode", help="build the clause structure of a CNF")
    sp.add_argument("--dimacs", required=True)
    sp.add_argument("--out")

    sp = sub.add_parser("corpus", help="list or emit built-in examples")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true")
    g.add_argument("--emit", metavar="NAME")

    return p


_HANDLERS = {
    "parse": _cmd_parse,
    "eval": _cmd_eval,
    "run-datalog": _cmd_run_datalog,
    "translate": _cmd_translate,
    "equiv": _cmd_equiv,
    "closure": _cmd_closure,
    "cnf-encode": _cmd_cnf_encode,
    "corpus": _cmd_corpus,
}


def run_command(argv) -> CommandOutcome:
    parser = _build_parser()
    command = "?"
    machine = False
    try:
        ns = parser.parse_args(list(argv))
        command = ns.command
        machine = ns.machine
        code, lines, pairs = _HANDLERS[ns.command](ns)
    except _UsageError as e:
        return CommandOutcome(2, f"usage error: {e}",
                              _machine_text(command, 2, [("error", str(e))]), machine)
    except BudgetExceeded as e:
        return CommandOutcome(3, f"budget exceeded: {e}",
                              _machine_text(command, 3, [("error", str(e))]), machine)
    except (HornlabError, OSError, UnicodeDecodeError) as e:
        return CommandOutcome(2, f"error: {e}",
                              _machine_text(command, 2, [("error", str(e))]), machine)
    return CommandOutcome(code, "\n".join(lines),
                          _machine_text(command, code, pairs), machine)


def main(argv=None) -> int:
    try:
        out = run_command(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    text = out.machine_report if out.machine else out.report
    if text:
        print(text)
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
