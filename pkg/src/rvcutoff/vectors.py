"""Immutable sparse vectors keyed by place or transition names."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from fractions import Fraction
from math import lcm
from numbers import Rational
from typing import Union

Number = Union[int, Fraction]


class SparseVector(Mapping):
    """A finitely supported vector ``name -> number``; zero entries are dropped.

    Missing keys read as 0, so ``v["anything"]`` never raises.
    """

    __slots__ = ("_data", "_hash")

    def __init__(self, entries: Mapping | Iterable[tuple[str, Number]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict[str, Number] = {}
        for key, value in items:
            value = self._coerce(value)
            if value:
                data[key] = data.get(key, 0) + value
                if not data[key]:
                    del data[key]
        self._check(data)
        self._data = data
        self._hash = None

    @staticmethod
    def _coerce(value):
        if isinstance(value, bool) or not isinstance(value, Rational):
            raise TypeError(f"expected an exact number, got {value!r}")
        if isinstance(value, Fraction) and value.denominator == 1:
            return int(value.numerator)
        return value

    def _check(self, data: dict) -> None:
        pass

    def __getitem__(self, key: str) -> Number:
        return self._data.get(key, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, key) -> bool:
        return key in self._data

    def __eq__(self, other) -> bool:
        if isinstance(other, SparseVector):
            return self._data == other._data
        if isinstance(other, Mapping):
            return self._data == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self._data.items())
        return f"{type(self).__name__}({{{body}}})"

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self._data)

    def norm(self) -> Number:
        """L1 norm (sum of absolute values)."""
        return sum((abs(v) for v in self._data.values()), 0)

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for v in self._data.values())

    def denominator_lcm(self) -> int:
        """Least positive k with k * self integral."""
        return lcm(1, *(Fraction(v).denominator for v in self._data.values()))

    def as_list(self, keys: Iterable[str]) -> list[Number]:
        return [self._data.get(k, 0) for k in keys]

    def _combine(self, other: Mapping, sign: int):
        data = dict(self._data)
        for k, v in other.items():
            data[k] = data.get(k, 0) + sign * v
        return data

    def __add__(self, other: Mapping):
        return type(self)(self._combine(other, 1))

    def __sub__(self, other: Mapping):
        return SolutionVector(self._combine(other, -1))

    def __mul__(self, factor: Number):
        return type(self)({k: v * factor for k, v in self._data.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return SolutionVector({k: -v for k, v in self._data.items()})


class SolutionVector(SparseVector):
    """Rational or integer solution of a linear system, e.g. a Parikh vector."""

    __slots__ = ()

    def __truediv__(self, divisor: Number) -> SolutionVector:
        return SolutionVector({k: Fraction(v) / divisor for k, v in self._data.items()})

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._data.values())


class Marking(SparseVector):
    """A multiset of places (nonnegative integer token counts)."""

    __slots__ = ()

    def _check(self, data: dict) -> None:
        for key, value in data.items():
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"marking entry {key}={value} is not a nonnegative integer")

    @property
    def size(self) -> int:
        return sum(self._data.values())

    def __sub__(self, other: Mapping) -> SolutionVector:
        return SolutionVector(self._combine(other, -1))

    def covers(self, other: Mapping) -> bool:
        return all(self[k] >= v for k, v in other.items())

    def to_tuple(self, places: Iterable[str]) -> tuple[int, ...]:
        return tuple(self._data.get(p, 0) for p in places)

    @classmethod
    def from_tuple(cls, places: Iterable[str], values: Iterable[int]) -> Marking:
        return cls(zip(places, values))


def singleton(place: str, count: int = 1) -> Marking:
    """The marking with ``count`` tokens on ``place``."""
    return Marking({place: count})
