"""Answer-set counting and compilation for head-cycle-free programs, guided by treewidth."""

from .cnf import CnfFormula, count_models, parse_dimacs
from .dp import count_answer_sets, enumerate_answer_sets, is_consistent
from .graphs import SccInfo, cnf_primal_graph, dependency_digraph, primal_graph, scc_info
from .oracle import SizeGuardError, brute_answer_sets, brute_models, tight_answer_sets
from .program import (
    ParseError,
    Program,
    ProgramBuilder,
    ProgramError,
    Rule,
    classify,
    format_program,
    is_answer_set,
    parse_program,
)
from .reductions import hcf_to_tight, tight_to_cnf, witness_td_cnf, witness_td_tight
from .treedecomp import NiceTD, TreeDecomposition, decompose, make_nice, read_td, validate_td, write_td

__version__ = "0.1.0"

__all__ = [
    "CnfFormula",
    "count_models",
    "parse_dimacs",
    "count_answer_sets",
    "enumerate_answer_sets",
    "is_consistent",
    "SccInfo",
    "cnf_primal_graph",
    "dependency_digraph",
    "primal_graph",
    "scc_info",
    "SizeGuardError",
    "brute_answer_sets",
    "brute_models",
    "tight_answer_sets",
    "ParseError",
    "Program",
    "ProgramBuilder",
    "ProgramError",
    "Rule",
    "classify",
    "format_program",
    "is_answer_set",
    "parse_program",
    "hcf_to_tight",
    "tight_to_cnf",
    "witness_td_cnf",
    "witness_td_tight",
    "NiceTD",
    "TreeDecomposition",
    "decompose",
    "make_nice",
    "read_td",
    "validate_td",
    "write_td",
]
