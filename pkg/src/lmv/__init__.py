"""Call-by-value lambda-mu calculus with conjunction and disjunction:
terms, typing, reduction, segment-trees, parallel reduction and complete
development, plus property suites that check confluence on generated terms."""

from .formula import And, Arrow, Atom, BOTTOM, Bottom, Formula, Or, is_tautology, print_formula
from .gen import GenConfig, GenerationFailure, gen_term, gen_typed_term, gen_value
from .harness import SUITES, SuiteReport, run_suite
from .parallel import (
    DEFAULT_BUDGET,
    ReductBudget,
    Verdict,
    check_confluence_tile,
    check_diamond,
    check_key_lemma,
    complete_development,
    is_parallel_reduct,
    parallel_reducts,
)
from .reduction import (
    CBN_RULES,
    CBV_RULES,
    RedexSite,
    ReductionTrace,
    contract,
    find_redexes,
    normalize,
    step,
)
from .segments import (
    SegmentTree,
    SegmentWood,
    acceptors,
    buds,
    enumerate_segment_trees,
    extended_structural_reduce,
    maximal_segment_tree,
    restrict,
    segment_successors,
    wood_substitute,
)
from .syntax import ParseError, parse_eterm, parse_formula, parse_term, print_eterm, print_term
from .terms import (
    App,
    Case,
    Inj,
    Lam,
    Mu,
    Named,
    Pair,
    Proj,
    Term,
    Var,
    alpha_eq,
    is_value,
    mu_subst_arg,
    mu_subst_fun,
    subst_var,
)
from .typecheck import EMPTY, ContextPair, TypeCheckError, check, contract_typed, infer

__version__ = "0.1.0"

__all__ = [
    "acceptors",
    "alpha_eq",
    "And",
    "App",
    "Arrow",
    "Atom",
    "BOTTOM",
    "Bottom",
    "buds",
    "Case",
    "CBN_RULES",
    "CBV_RULES",
    "check",
    "check_confluence_tile",
    "check_diamond",
    "check_key_lemma",
    "complete_development",
    "ContextPair",
    "contract",
    "contract_typed",
    "DEFAULT_BUDGET",
    "EMPTY",
    "enumerate_segment_trees",
    "extended_structural_reduce",
    "find_redexes",
    "Formula",
    "gen_term",
    "gen_typed_term",
    "gen_value",
    "GenConfig",
    "GenerationFailure",
    "infer",
    "Inj",
    "is_parallel_reduct",
    "is_tautology",
    "is_value",
    "Lam",
    "maximal_segment_tree",
    "Mu",
    "mu_subst_arg",
    "mu_subst_fun",
    "Named",
    "normalize",
    "Or",
    "Pair",
    "parallel_reducts",
    "parse_eterm",
    "parse_formula",
    "parse_term",
    "ParseError",
    "print_eterm",
    "print_formula",
    "print_term",
    "Proj",
    "RedexSite",
    "ReductBudget",
    "ReductionTrace",
    "restrict",
    "run_suite",
    "segment_successors",
    "SegmentTree",
    "SegmentWood",
    "step",
    "subst_var",
    "SuiteReport",
    "SUITES",
    "Term",
    "TypeCheckError",
    "Var",
    "Verdict",
    "wood_substitute",
]
