"""Greedy dual-fitting algorithms for uncapacitated facility location."""

from facloc.errors import FaclocError, GenerationError, ParameterError, ParseError, StructuralError
from facloc.instances import GenSpec, from_native, generate, parse_orlib, read_instance, to_native, write_instance
from facloc.model import (
    DualCertificate,
    Instance,
    Solution,
    brute_force_opt,
    check_metric,
    check_overtight,
    make_solution,
    total_cost,
)
from facloc.solvers import ALGORITHMS, SolverOutput, greedy1, greedy1_restatement, greedy1_star, greedy2, jv

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "DualCertificate",
    "FaclocError",
    "GenSpec",
    "GenerationError",
    "Instance",
    "ParameterError",
    "ParseError",
    "Solution",
    "SolverOutput",
    "StructuralError",
    "brute_force_opt",
    "check_metric",
    "check_overtight",
    "from_native",
    "generate",
    "greedy1",
    "greedy1_restatement",
    "greedy1_star",
    "greedy2",
    "jv",
    "make_solution",
    "parse_orlib",
    "read_instance",
    "to_native",
    "total_cost",
    "write_instance",
]
