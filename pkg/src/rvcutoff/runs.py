"""Run-length-encoded firing sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .vectors import SolutionVector


@dataclass(frozen=True)
class RleRun:
    """A firing sequence stored as blocks ``(sequence, repetitions)``."""

    blocks: tuple[tuple[tuple[str, ...], int], ...] = ()

    def __post_init__(self):
        blocks = []
        for seq, count in self.blocks:
            seq = (seq,) if isinstance(seq, str) else tuple(seq)
            if not isinstance(count, int) or count < 1:
                raise ValueError(f"repetition count must be a positive integer, got {count!r}")
            if seq:
                blocks.append((seq, count))
        object.__setattr__(self, "blocks", tuple(blocks))

    @classmethod
    def of(cls, sequence: Iterable[str]) -> RleRun:
        """Plain sequence as a single block."""
        return cls(((tuple(sequence), 1),))

    def __add__(self, other: RleRun) -> RleRun:
        return RleRun(self.blocks + other.blocks)

    def scaled(self, factor: int) -> RleRun:
        """Every block repeated ``factor`` times as often (parallel copies, layered)."""
        return RleRun(tuple((seq, count * factor) for seq, count in self.blocks))

    @property
    def expanded_length(self) -> int:
        return sum(len(seq) * count for seq, count in self.blocks)

    @property
    def stored_steps(self) -> int:
        return sum(len(seq) for seq, _ in self.blocks)

    def parikh(self) -> SolutionVector:
        counts: dict[str, int] = {}
        for seq, count in self.blocks:
            for t in seq:
                counts[t] = counts.get(t, 0) + count
        return SolutionVector(counts)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(t for seq, _ in self.blocks for t in seq)

    def expand(self) -> Iterator[str]:
        for seq, count in self.blocks:
            for _ in range(count):
                yield from seq

    def merged(self) -> RleRun:
        """Adjacent blocks with identical sequences fused."""
        out: list[list] = []
        for seq, count in self.blocks:
            if out and out[-1][0] == seq:
                out[-1][1] += count
            else:
                out.append([seq, count])
        return RleRun(tuple((seq, count) for seq, count in out))
