"""Intersection of finite automata with context-free and definite clause grammars."""

from .barhillel import intersect_naive, language_upto, reduce
from .forest import ForestGrammar, ParseTree, enumerate_strings, extract_trees, is_empty
from .fsa import Fsa, Transition, accepts, from_string, is_acyclic
from .grammar import Grammar, cf_skeleton, is_context_free, offline_parsable
from .parser import (CfgExact, DcgAcyclicOnly, DcgSkeleton, DcgThreshold, DcgUnrestricted,
                     Status, Unknown, Verdict, emptiness_verdict, intersect_cfg, intersect_dcg)
from .pcp import PcpInstance, PcpSolution, encode, solve_bounded, verify_solution
from .terms import Struct, Var, apply, parse_term, rename_apart, unify

__all__ = [
    "intersect_naive", "language_upto", "reduce",
    "ForestGrammar", "ParseTree", "enumerate_strings", "extract_trees", "is_empty",
    "Fsa", "Transition", "accepts", "from_string", "is_acyclic",
    "Grammar", "cf_skeleton", "is_context_free", "offline_parsable",
    "CfgExact", "DcgAcyclicOnly", "DcgSkeleton", "DcgThreshold", "DcgUnrestricted",
    "Status", "Unknown", "Verdict", "emptiness_verdict", "intersect_cfg", "intersect_dcg",
    "PcpInstance", "PcpSolution", "encode", "solve_bounded", "verify_solution",
    "Struct", "Var", "apply", "parse_term", "rename_apart", "unify",
]
