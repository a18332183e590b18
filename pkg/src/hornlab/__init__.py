"""Workbench for Horn-shaped second-order logic, rule programs, and fixed points."""

from .syntax import (
    And, ArityMismatch, Bottom, BudgetExceeded, Cst, Eq, Exists, Forall,
    Formula, HornlabError, Implies, Lfp, Not, Or, ParseError, PositivityError,
    Rel, SLfp, SLfpComp, ShapeError, SoExists, SoForall, Term, Top, UnivAtom,
    ValidationError, Var, free_vars,
)
from .core import (
    FiniteStructure, VocabularySpec, cnf_satisfiable, cnf_to_structure,
    count_structures, enumerate_structures, eval_fo, extend_structure,
    induced_substructure, structures_up_to, to_prenex_dnf,
)
from .second_order import (
    ClausalCore, FragmentTag, HornClause, SoFormula, SoQuant, as_so_formula,
    classify_fragment, eval_so_bruteforce, normalize_clauses,
)
from .datalog import (
    Cond, DatalogProgram, DatalogQuery, DatalogRule, StageTrace,
    StratifiedProgram, StratifiedQuery, eval_datalog, eval_stratified,
    stage_bound, validate_program,
)
from .lfp import eval_lfp, lfp_fixpoint, lfp_stages, slfp_to_lfp
from .transforms import (
    TransformReport, datalog_r_to_slfp, datalog_star_to_r, datalog_to_so_horn,
    fo_to_datalog_r, fo_to_s_datalog, lfp_normal_to_datalog_r, pi11_to_ehorn_r,
    sigma11_push_exists, so_horn_to_datalog, stratified_horn_datalog,
    swap_forall_exists, to_existential_fragment,
)
from .lab import (
    Counterexample, EquivVerdict, check_closure, check_duality, check_equiv,
    corpus, corpus_item, make_ordered_structure,
)
from .textio import (
    format_dimacs, format_formula, format_program, format_structure,
    format_vocab, parse_dimacs, parse_formula, parse_program, parse_structure,
    parse_vocab,
)

__version__ = "0.1.0"
