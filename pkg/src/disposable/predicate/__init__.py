"""First-order formulas over (N, +, <) with automatic sequences, compiled to automata."""

from .automaton import (StateLimitExceeded, TrackAutomaton, accepted_set_if_finite, accepted_values,
                        complement, minimize, project)
from .compiler import CompileError, PredicateEnv, compile_formula, run_commands, split_commands
from .parser import FormulaSyntaxError, ParsedFormula, free_variables, parse_formula

DISPO_POS = (
    "?msd_2 Ai,n (i < j & j < i+2*n) => (Ek i <=\n"
    "    k & ((j < i+n & k <= i+n) | (j >= i+n & k < i+n)) & (((j < k | j >\n"
    "    k+n) & VTM[k] != VTM[k+n]) | ((k < j & j <= k+n) & VTM[k] !=\n"
    "    VTM[k+n+1])))"
)

DISPO_DELTA = (
    "?msd_2 Ei,j i >=2 & j > i & j = i+l &\n"
    "  $dispo_pos(i) & $dispo_pos(j) & (Ak (i<k & k<j) =>\n"
    "  ~$dispo_pos(k))"
)

__all__ = [
    "DISPO_DELTA", "DISPO_POS", "CompileError", "FormulaSyntaxError", "ParsedFormula", "PredicateEnv",
    "StateLimitExceeded", "TrackAutomaton", "accepted_set_if_finite", "accepted_values", "compile_formula",
    "complement", "free_variables", "minimize", "parse_formula", "project", "run_commands", "split_commands",
]
