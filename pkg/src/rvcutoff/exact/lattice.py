"""Integer linear systems ``A y = b`` via a column Hermite form."""

from __future__ import annotations

from .systems import FEASIBLE, FIXED_ZERO, INFEASIBLE, INTEGER, LinearSystem, SolveResult


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def hermite_columns(matrix: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[tuple[int, int]]]:
    """Column-style Hermite form.

    Returns columns of H, columns of a unimodular U with A U = H, and the
    (row, column) pivot positions. H is lower echelon: pivot entries are
    positive and the entries left of a pivot are reduced modulo it.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    cols = [[matrix[i][j] for i in range(m)] for j in range(n)]
    ucols = [[int(i == j) for i in range(n)] for j in range(n)]

    def combine(k, j, s, t, u, v):
        # (col_k, col_j) <- (s col_k + t col_j, u col_k + v col_j), det = s v - t u = 1
        ck, cj = cols[k], cols[j]
        cols[k] = [s * x + t * y for x, y in zip(ck, cj)]
        cols[j] = [u * x + v * y for x, y in zip(ck, cj)]
        uk, uj = ucols[k], ucols[j]
        ucols[k] = [s * x + t * y for x, y in zip(uk, uj)]
        ucols[j] = [u * x + v * y for x, y in zip(uk, uj)]

    pivots = []
    k = 0
    for i in range(m):
        if k == n:
            break
        for j in range(k + 1, n):
            b = cols[j][i]
            if b == 0:
                continue
            a = cols[k][i]
            g, s, t = ext_gcd(a, b)
            combine(k, j, s, t, -b // g, a // g)
        piv = cols[k][i]
        if piv == 0:
            continue
        if piv < 0:
            cols[k] = [-x for x in cols[k]]
            ucols[k] = [-x for x in ucols[k]]
            piv = -piv
        for q in range(k):
            f = cols[q][i] // piv
            if f:
                cols[q] = [x - f * y for x, y in zip(cols[q], cols[k])]
                ucols[q] = [x - f * y for x, y in zip(ucols[q], ucols[k])]
        pivots.append((i, k))
        k += 1
    return cols, ucols, pivots


def integer_solve(system: LinearSystem) -> SolveResult:
    """Exact decision of ``A y = b`` over the integers; fixed-zero columns are deleted."""
    for tag in system.tags:
        if tag not in (INTEGER, FIXED_ZERO):
            raise ValueError(f"integer_solve handles integer and fixed-zero only, got {tag!r}")
    keep = [j for j, tag in enumerate(system.tags) if tag != FIXED_ZERO]
    rows = [[row[j] for j in keep] for row in system.matrix]
    b = list(system.rhs)
    if not keep:
        if any(b):
            return SolveResult(INFEASIBLE)
        return SolveResult(FEASIBLE, system.vector([0] * len(system.tags)))
    cols, ucols, pivots = hermite_columns(rows)
    z = [0] * len(keep)
    pivot_of = dict(pivots)
    for i, bi in enumerate(b):
        val = bi - sum(cols[q][i] * z[q] for q in range(len(keep)) if z[q] and cols[q][i])
        p = pivot_of.get(i)
        if p is None:
            if val:
                return SolveResult(INFEASIBLE)
            continue
        zq, rem = divmod(val, cols[p][i])
        if rem:
            return SolveResult(INFEASIBLE)
        z[p] = zq
    y_local = [0] * len(keep)
    for q, zq in enumerate(z):
        if zq:
            y_local = [a + zq * u for a, u in zip(y_local, ucols[q])]
    y = [0] * len(system.tags)
    for j, val in zip(keep, y_local):
        y[j] = val
    return SolveResult(FEASIBLE, system.vector(y))
