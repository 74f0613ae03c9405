"""Dense LP solver and the programs built on it."""

from facloc.lp.lptext import export_lp_text, parse_lp_text
from facloc.lp.model import LpBuilder, LpModel, LpSolution
from facloc.lp.programs import (
    FrlpSpec,
    build_fl_relaxation,
    build_frlp,
    lp_bound,
    solve_frlp,
    solve_frlp_cumulative,
    solve_frlp_full,
    tight_instance,
)
from facloc.lp.simplex import simplex_solve

__all__ = [
    "FrlpSpec",
    "LpBuilder",
    "LpModel",
    "LpSolution",
    "build_fl_relaxation",
    "build_frlp",
    "export_lp_text",
    "lp_bound",
    "parse_lp_text",
    "simplex_solve",
    "solve_frlp",
    "solve_frlp_cumulative",
    "solve_frlp_full",
    "tight_instance",
]
