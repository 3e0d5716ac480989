"""Automata-network modules: wiring, output functions, attractors, synthesis."""

from .core import ExprFunction, Module, TableFunction, update, update_sequence
from .dynamics import Attractor, attractor_exists_fpt, attractors, bound_table, count_attractors_by_size
from .errors import CapExceeded, ModulantError, NotAcyclicError, ParseError, ValidationError, WiringError
from .expr import parse_expression
from .output import OutputFunction, compute_output_functions
from .synth import synthesize_minimal_one_to_one
from .textio import load_module, parse_module
from .wiring import close, nonrecursive_wire, recursive_wire

__version__ = "0.1.0"

__all__ = [
    "Attractor",
    "CapExceeded",
    "ExprFunction",
    "ModulantError",
    "Module",
    "NotAcyclicError",
    "OutputFunction",
    "ParseError",
    "TableFunction",
    "ValidationError",
    "WiringError",
    "attractor_exists_fpt",
    "attractors",
    "bound_table",
    "close",
    "compute_output_functions",
    "count_attractors_by_size",
    "load_module",
    "nonrecursive_wire",
    "parse_expression",
    "parse_module",
    "recursive_wire",
    "synthesize_minimal_one_to_one",
    "update",
    "update_sequence",
]
