"""Tabled constraint logic programming: memoized resolution in which delayed
literals travel into, out of and within tabled sub-computations."""
from .engine import EngineConfig, ProofResult, derivation_trees, resolve_clause, run
from .grammars import load_bundled
from .oracles import datalog_fixpoint, sld_solve
from .policies import abstract_goal, control, is_delayed, select_program_literal
from .syntax import Policy, Program, format_clause, format_term, parse_clause, parse_goal, parse_program, parse_term
from .terms import App, Clause, Var, VarSupply, canonical_key, rename_apart, resolve_term, unify

__all__ = [
    "App", "Clause", "EngineConfig", "Policy", "Program", "ProofResult", "Var", "VarSupply",
    "abstract_goal", "canonical_key", "control", "datalog_fixpoint", "derivation_trees",
    "format_clause", "format_term", "is_delayed", "load_bundled", "parse_clause", "parse_goal",
    "parse_program", "parse_term", "rename_apart", "resolve_clause", "resolve_term", "run",
    "select_program_literal", "sld_solve", "unify",
]
