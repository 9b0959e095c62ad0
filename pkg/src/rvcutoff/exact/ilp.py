"""Small integer programs: depth-first branch and bound on the exact LP relaxation."""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor

from .lattice import integer_solve
from .lp import ExactSimplex
from .systems import (
    BUDGET_EXCEEDED,
    FEASIBLE,
    FIXED_ZERO,
    INFEASIBLE,
    INTEGER,
    INTEGER_NN,
    INTEGER_POS,
    RATIONAL_NN,
    LinearSystem,
    SolveResult,
)

DEFAULT_NODE_BUDGET = 10**5


def _relaxation(system: LinearSystem, lo: dict[int, int], hi: dict[int, int]):
    """LP for the box ``lo <= x <= hi`` with x shifted by lo and one slack row per upper bound."""
    n = len(system.tags)
    rows = [list(row) for row in system.matrix]
    rhs = [b - sum(row[j] * l for j, l in lo.items()) for row, b in zip(system.matrix, system.rhs)]
    tags = [FIXED_ZERO if t == FIXED_ZERO else RATIONAL_NN for t in system.tags]
    for row in rows:
        row.extend([0] * len(hi))
    for k, (j, u) in enumerate(sorted(hi.items())):
        width = u - lo.get(j, 0)
        if width < 0:
            return None
        row = [0] * (n + len(hi))
        row[j] = 1
        row[n + k] = 1
        rows.append(row)
        rhs.append(width)
    tags += [RATIONAL_NN] * len(hi)
    return LinearSystem(tuple(map(tuple, rows)), tuple(rhs), tuple(tags))


def _branch_and_bound(system: LinearSystem, root_lo: dict, root_hi: dict, budget: int):
    """Depth-first search inside a box; returns (solution or None, nodes, exhausted)."""
    n = len(system.tags)
    stack = [(root_lo, root_hi)]
    nodes = 0
    while stack:
        if nodes >= budget:
            return None, nodes, False
        lo, hi = stack.pop()
        nodes += 1
        relaxed = _relaxation(system, lo, hi)
        if relaxed is None:
            continue
        simplex = ExactSimplex(relaxed)
        if not simplex.feasible:
            continue
        # prefer small vertices: minimize the sum of the original variables
        result = simplex.maximize({j: -1 for j in range(n) if system.tags[j] != FIXED_ZERO})
        values = [result.solution[relaxed.names[j]] + lo.get(j, 0) for j in range(n)]
        frac = [
            (abs(Fraction(v) - floor(v) - Fraction(1, 2)), j)
            for j, v in enumerate(values)
            if Fraction(v).denominator != 1
        ]
        if not frac:
            solution = system.vector([int(v) for v in values])
            assert system.satisfied_by(solution)
            return solution, nodes, True
        _, j = min(frac)
        v = values[j]
        down = (lo, {**hi, j: floor(v)})
        up = ({**lo, j: ceil(v)}, hi)
        # ties go down: small solutions first
        first, second = (down, up) if v - floor(v) <= Fraction(1, 2) else (up, down)
        stack.append(second)
        stack.append(first)
    return None, nodes, True


def ilp_feasible(system: LinearSystem, node_budget: int = DEFAULT_NODE_BUDGET) -> SolveResult:
    """Find an integer point of ``A x = b`` under integer>=0 / integer>=1 / fixed-zero tags.

    A lattice check over Z runs first, so parity-style infeasibility is proven
    without search. On an unbounded relaxation plain depth-first search can
    drift forever, so it runs inside boxes [0, U] with U = 1, 2, 4, ... and
    infeasibility is then never claimed. Budget exhaustion is reported as
    ``budget-exceeded``.
    """
    if node_budget <= 0:
        raise ValueError("node_budget must be positive")
    for tag in system.tags:
        if tag not in (INTEGER_NN, INTEGER_POS, FIXED_ZERO):
            raise ValueError(f"ilp_feasible handles integer>=0, integer>=1, fixed-zero; got {tag!r}")
    n = len(system.tags)
    free = [j for j in range(n) if system.tags[j] != FIXED_ZERO]
    lattice = integer_solve(system.with_tags({system.names[j]: INTEGER for j in free}))
    if not lattice.feasible:
        return SolveResult(INFEASIBLE, notes=["lattice infeasible"])
    root_lo = {j: 1 for j, t in enumerate(system.tags) if t == INTEGER_POS}
    root = ExactSimplex(_relaxation(system, root_lo, {}))
    if not root.feasible:
        return SolveResult(INFEASIBLE, nodes=1, notes=["relaxation infeasible"])
    if root.maximize({j: 1 for j in free}).status == FEASIBLE:
        solution, nodes, exhausted = _branch_and_bound(system, root_lo, {}, node_budget)
        if solution is not None:
            return SolveResult(FEASIBLE, solution, nodes=nodes)
        return SolveResult(INFEASIBLE if exhausted else BUDGET_EXCEEDED, nodes=nodes)
    used, bound = 0, 1
    while used < node_budget:
        hi = {j: max(bound, root_lo.get(j, 0)) for j in free}
        solution, nodes, _ = _branch_and_bound(system, root_lo, hi, node_budget - used)
        used += nodes
        if solution is not None:
            return SolveResult(FEASIBLE, solution, nodes=used, notes=[f"found inside box bound {bound}"])
        bound *= 2
    return SolveResult(BUDGET_EXCEEDED, nodes=used, notes=["unbounded relaxation"])
