"""Linear systems over GF(2), rows packed into Python ints."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .systems import FEASIBLE, INFEASIBLE, SolveResult


@dataclass(frozen=True)
class F2System:
    """Rows as bitmasks (bit j = coefficient of variable j) with a 0/1 rhs."""

    rows: tuple[int, ...]
    rhs: tuple[int, ...]
    n: int
    names: tuple[str, ...] = ()

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence[int]], rhs: Sequence[int], names=()) -> F2System:
        n = len(matrix[0]) if matrix else len(names)
        rows = tuple(sum(1 << j for j, a in enumerate(row) if a % 2) for row in matrix)
        return cls(rows, tuple(b % 2 for b in rhs), n, tuple(names))

    def satisfied_by(self, bits: Sequence[int]) -> bool:
        x = sum(1 << j for j, v in enumerate(bits) if v % 2)
        return all(bin(row & x).count("1") % 2 == b for row, b in zip(self.rows, self.rhs))


def f2_solve(system: F2System) -> SolveResult:
    """Gaussian elimination mod 2; free variables are set to 0."""
    pivots: list[tuple[int, int, int]] = []  # (column, row mask, rhs)
    for row, b in zip(system.rows, system.rhs):
        for col, prow, pb in pivots:
            if row >> col & 1:
                row ^= prow
                b ^= pb
        if row == 0:
            if b:
                return SolveResult(INFEASIBLE)
            continue
        col = row.bit_length() - 1
        # keep earlier pivot rows reduced in the new pivot column
        pivots = [
            (c, r ^ row, rb ^ b) if r >> col & 1 else (c, r, rb) for c, r, rb in pivots
        ]
        pivots.append((col, row, b))
    x = 0
    for col, row, b in pivots:
        if b:
            x |= 1 << col
    bits = tuple(x >> j & 1 for j in range(system.n))
    return SolveResult(FEASIBLE, bits)
