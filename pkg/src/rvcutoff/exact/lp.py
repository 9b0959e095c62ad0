"""Exact simplex over integer tableaus (fraction-free pivoting, Bland's rule).

The tableau holds ``D * B^-1 [A | I | b]`` as Python ints, where ``D`` is the
absolute determinant of the current basis. Pivoting on ``(r, c)`` replaces
every other row by ``(piv * row - row[c] * pivot_row) // D`` which is exact,
so entries stay integral and bounded by basis minors.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .systems import (
    FEASIBLE,
    FIXED_ZERO,
    INFEASIBLE,
    RATIONAL_NN,
    UNBOUNDED,
    FarkasCertificate,
    LinearSystem,
    LPResult,
)
from ..vectors import SolutionVector


class ExactSimplex:
    """Phase-one feasible tableau that can be re-optimized for many objectives.

    Fixed-zero columns are dropped up front. After construction either
    ``feasible`` is False and ``certificate`` proves it, or the tableau holds a
    basic feasible solution and :meth:`maximize` may be called repeatedly; each
    call warm-starts from the previous basis.
    """

    def __init__(self, system: LinearSystem):
        for tag in system.tags:
            if tag not in (RATIONAL_NN, FIXED_ZERO):
                raise ValueError(f"LP handles rational>=0 and fixed-zero only, got {tag!r}")
        self.system = system
        self.columns = [j for j, tag in enumerate(system.tags) if tag != FIXED_ZERO]
        self.n = len(self.columns)
        self.local = {j: k for k, j in enumerate(self.columns)}
        self.certificate: FarkasCertificate | None = None
        self.pivots = 0
        self._phase_one()

    # -------------------------------------------------------------- core

    def _pivot(self, r: int, c: int) -> None:
        T, D = self.T, self.D
        prow = T[r]
        piv = prow[c]
        rows = T if self.obj is None else T + [self.obj]
        new = []
        for i, row in enumerate(rows):
            if i == r:
                new.append(row)
                continue
            f = row[c]
            if f == 0:
                new.append(row if piv == D else [x * piv // D for x in row])
            else:
                new.append([(piv * x - f * y) // D for x, y in zip(row, prow)])
        if piv < 0:
            new = [[-x for x in row] for row in new]
            piv = -piv
        if self.obj is not None:
            self.obj = new.pop()
        self.T = new
        self.D = piv
        self.basis[r] = c
        self.pivots += 1

    def _run(self, allowed: int) -> int | None:
        """Pivot until optimal; return an unbounded entering column or None."""
        rhs = -1
        while True:
            obj = self.obj
            c = next((j for j in range(allowed) if obj[j] < 0), None)
            if c is None:
                return None
            T = self.T
            best = None
            for i, row in enumerate(T):
                a = row[c]
                if a > 0:
                    if best is None:
                        best = i
                        continue
                    brow = T[best]
                    lhs, rhs_ = row[rhs] * brow[c], brow[rhs] * a
                    if lhs < rhs_ or (lhs == rhs_ and self.basis[i] < self.basis[best]):
                        best = i
            if best is None:
                return c
            self._pivot(best, c)

    def _phase_one(self) -> None:
        sys = self.system
        m, n = len(sys.rhs), self.n
        self.signs = [(-1 if b < 0 else 1) for b in sys.rhs]
        self.T = []
        for i, (row, b) in enumerate(zip(sys.matrix, sys.rhs)):
            s = self.signs[i]
            art = [0] * m
            art[i] = 1
            self.T.append([s * row[j] for j in self.columns] + art + [s * b])
        self.D = 1
        self.basis = [n + i for i in range(m)]
        width = n + m + 1
        self.obj = [0] * width
        for row in self.T:
            for j in range(n):
                self.obj[j] -= row[j]
            self.obj[-1] -= row[-1]
        self._run(n + m)
        if self.obj[-1] != 0:
            # phase-one duals: y_i = row0[a_i] / D - 1, mapped back through the row flips
            y = tuple(
                s * (Fraction(self.obj[n + i], self.D) - 1) for i, s in enumerate(self.signs)
            )
            self.certificate = FarkasCertificate(y)
            self.feasible = False
            return
        self.feasible = True
        self._drive_out_artificials()

    def _drive_out_artificials(self) -> None:
        n = self.n
        self.obj = None
        i = 0
        while i < len(self.T):
            if self.basis[i] < n:
                i += 1
                continue
            row = self.T[i]
            c = next((j for j in range(n) if row[j] != 0), None)
            if c is None:
                # redundant equation: no other row uses it, drop it
                del self.T[i]
                del self.basis[i]
                continue
            self._pivot(i, c)
            i += 1
        # artificial columns are no longer needed
        self.T = [row[:n] + row[-1:] for row in self.T]

    # ------------------------------------------------------------ queries

    def _values(self) -> list[Fraction]:
        x = [Fraction(0)] * len(self.system.tags)
        for i, c in enumerate(self.basis):
            x[self.columns[c]] = Fraction(self.T[i][-1], self.D)
        return x

    def solution(self) -> SolutionVector:
        return self.system.vector(self._values())

    def maximize(self, objective: Mapping[int, int] | int) -> LPResult:
        """Maximize ``sum c_j x_j`` (variable indices of the original system)."""
        if not self.feasible:
            return LPResult(INFEASIBLE, certificate=self.certificate)
        if isinstance(objective, int):
            objective = {objective: 1}
        local = {self.local[j]: c for j, c in objective.items() if j in self.local}
        width = self.n + 1
        obj = [0] * width
        for j, c in local.items():
            obj[j] -= self.D * c
        for i, b in enumerate(self.basis):
            c = local.get(b)
            if c:
                row = self.T[i]
                obj = [o + c * x for o, x in zip(obj, row)]
        self.obj = obj
        enter = self._run(self.n)
        solution = self.solution()
        if enter is not None:
            ray = [Fraction(0)] * len(self.system.tags)
            ray[self.columns[enter]] = Fraction(1)
            for i, b in enumerate(self.basis):
                ray[self.columns[b]] = Fraction(-self.T[i][enter], self.D)
            self.obj = None
            return LPResult(UNBOUNDED, solution=solution, ray=self.system.vector(ray))
        value = Fraction(self.obj[-1], self.D)
        self.obj = None
        return LPResult(FEASIBLE, solution=solution, value=value)


def lp_solve(system: LinearSystem, objective: Mapping[int, int] | int | str | None = None) -> LPResult:
    """Decide ``A x = b`` over rational>=0 / fixed-zero variables, optionally maximizing.

    ``objective`` is a variable index, a variable name, or a sparse coefficient map.
    """
    simplex = ExactSimplex(system)
    if not simplex.feasible:
        return LPResult(INFEASIBLE, certificate=simplex.certificate)
    if objective is None:
        return LPResult(FEASIBLE, solution=simplex.solution())
    if isinstance(objective, str):
        objective = system.names.index(objective)
    return simplex.maximize(objective)
