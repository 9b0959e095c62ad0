"""Linear systems with per-variable domains, and the solver result records."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from ..vectors import SolutionVector

RATIONAL_NN = "rational>=0"
INTEGER = "integer"
INTEGER_NN = "integer>=0"
INTEGER_POS = "integer>=1"
FIXED_ZERO = "fixed-zero"
TAGS = (RATIONAL_NN, INTEGER, INTEGER_NN, INTEGER_POS, FIXED_ZERO)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class LinearSystem:
    """``A x = b`` over named variables, each carrying a domain tag."""

    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]
    tags: tuple[str, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        matrix = tuple(tuple(int(a) for a in row) for row in self.matrix)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", tuple(int(b) for b in self.rhs))
        object.__setattr__(self, "tags", tuple(self.tags))
        n = len(self.tags)
        names = tuple(self.names) or tuple(f"x{j}" for j in range(n))
        object.__setattr__(self, "names", names)
        if len(names) != n:
            raise ValueError("one name per variable required")
        if len(self.rhs) != len(matrix):
            raise ValueError("rhs length must match the number of rows")
        for row in matrix:
            if len(row) != n:
                raise ValueError("every row needs one coefficient per variable")
        for tag in self.tags:
            if tag not in TAGS:
                raise ValueError(f"unknown domain tag {tag!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), len(self.tags)

    @classmethod
    def from_columns(
        cls,
        rows: Sequence[str],
        columns: Mapping[str, Mapping[str, int]],
        rhs: Mapping[str, int],
        tags: Mapping[str, str] | str,
    ) -> LinearSystem:
        """Build from sparse columns ``var -> {row: coeff}`` and a sparse rhs."""
        names = tuple(columns)
        index = {r: i for i, r in enumerate(rows)}
        matrix = [[0] * len(names) for _ in rows]
        for j, name in enumerate(names):
            for r, a in columns[name].items():
                matrix[index[r]][j] += a
        if isinstance(tags, str):
            tags = {name: tags for name in names}
        return cls(
            tuple(map(tuple, matrix)),
            tuple(rhs.get(r, 0) for r in rows),
            tuple(tags[name] for name in names),
            names,
        )

    def residual(self, values: Sequence) -> list:
        return [sum(a * x for a, x in zip(row, values) if a) - b for row, b in zip(self.matrix, self.rhs)]

    def vector(self, values: Sequence) -> SolutionVector:
        return SolutionVector(zip(self.names, values))

    def values(self, solution: Mapping) -> list:
        return [solution.get(name, 0) for name in self.names]

    def satisfied_by(self, solution: Mapping) -> bool:
        """Exact check of equations and domain tags."""
        values = self.values(solution)
        if any(self.residual(values)):
            return False
        for x, tag in zip(values, self.tags):
            x = Fraction(x)
            if tag == FIXED_ZERO and x != 0:
                return False
            if tag != RATIONAL_NN and x.denominator != 1:
                return False
            if tag in (RATIONAL_NN, INTEGER_NN) and x < 0:
                return False
            if tag == INTEGER_POS and x < 1:
                return False
        return True

    def with_tags(self, tags: Mapping[str, str] | str) -> LinearSystem:
        if isinstance(tags, str):
            new = (tags,) * len(self.tags)
        else:
            new = tuple(tags.get(name, tag) for name, tag in zip(self.names, self.tags))
        return LinearSystem(self.matrix, self.rhs, new, self.names)


@dataclass(frozen=True)
class FarkasCertificate:
    """Row multipliers y with yA >= 0 on the free columns and yb < 0."""

    multipliers: tuple[Fraction, ...]

    def verify(self, system: LinearSystem) -> bool:
        y = self.multipliers
        if len(y) != len(system.rhs):
            return False
        if sum(yi * b for yi, b in zip(y, system.rhs)) >= 0:
            return False
        for j, tag in enumerate(system.tags):
            if tag == FIXED_ZERO:
                continue
            col = sum(yi * row[j] for yi, row in zip(y, system.matrix))
            if tag == INTEGER and col != 0:
                return False
            if col < 0:
                return False
        return True


@dataclass
class LPResult:
    """Outcome of an exact LP. ``solution`` is set for feasible and unbounded."""

    status: str
    solution: SolutionVector | None = None
    value: Fraction | None = None
    certificate: FarkasCertificate | None = None
    ray: SolutionVector | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


@dataclass
class SolveResult:
    """Outcome of an integer, GF(2) or ILP solve."""

    status: str
    solution: SolutionVector | tuple | None = None
    nodes: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE
