"""Exact solvers over Q, Z and GF(2)."""

from .f2 import F2System, f2_solve
from .ilp import DEFAULT_NODE_BUDGET, ilp_feasible
from .lattice import hermite_columns, integer_solve
from .lp import ExactSimplex, lp_solve
from .systems import (
    BUDGET_EXCEEDED,
    FEASIBLE,
    FIXED_ZERO,
    INFEASIBLE,
    INTEGER,
    INTEGER_NN,
    INTEGER_POS,
    RATIONAL_NN,
    UNBOUNDED,
    FarkasCertificate,
    LinearSystem,
    LPResult,
    SolveResult,
)

__all__ = [
    "BUDGET_EXCEEDED",
    "DEFAULT_NODE_BUDGET",
    "ExactSimplex",
    "F2System",
    "FEASIBLE",
    "FIXED_ZERO",
    "FarkasCertificate",
    "INFEASIBLE",
    "INTEGER",
    "INTEGER_NN",
    "INTEGER_POS",
    "LPResult",
    "LinearSystem",
    "RATIONAL_NN",
    "SolveResult",
    "UNBOUNDED",
    "f2_solve",
    "hermite_columns",
    "ilp_feasible",
    "integer_solve",
    "lp_solve",
]
