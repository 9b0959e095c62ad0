"""Explicit-state ground truth: BFS reachability, cut-off sweeps, run validation."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import PetriNet, PetriNetSystem
from .runs import RleRun
from .vectors import Marking

YES = "yes"
NO_EXHAUSTIVE = "no-exhaustive"
BUDGET_EXCEEDED = "budget-exceeded"

DEFAULT_NODE_BUDGET = 10**5
DEFAULT_N_MAX = 10
EXPAND_LIMIT = 64


class ValidationError(ValueError):
    pass


class DisabledAt(ValidationError):
    """Transition not enabled: block index (0-based), iteration (1-based), position (0-based)."""

    def __init__(self, block: int, iteration: int, position: int, transition: str):
        self.block, self.iteration, self.position, self.transition = block, iteration, position, transition
        super().__init__(f"{transition} disabled at block {block}, iteration {iteration}, position {position}")

    @property
    def where(self) -> tuple[int, int, int, str]:
        return self.block, self.iteration, self.position, self.transition


@dataclass
class ReachResult:
    status: str
    run: tuple[str, ...] | None = None
    explored: int = 0
    reached: Marking | None = None

    @property
    def found(self) -> bool:
        return self.status == YES


def bfs_reach(
    net: PetriNet,
    source: Mapping[str, int],
    target: Mapping[str, int] | None = None,
    cover: str | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
    order: Sequence[str] | None = None,
) -> ReachResult:
    """Breadth-first search from ``source`` to ``target`` (or to any marking with ``cover`` > 0).

    Transitions are tried in declaration order unless ``order`` is given.
    """
    if node_budget <= 0:
        raise ValueError("node_budget must be positive")
    if (target is None) == (cover is None):
        raise ValueError("give exactly one of target and cover")
    places = net.places
    start = Marking(source).to_tuple(places)
    order_idx = [net.transition_index[t] for t in (order or net.transitions)]
    if target is not None:
        goal = Marking(target).to_tuple(places)
        hit = goal.__eq__
    else:
        ci = net.place_index[cover]
        hit = lambda m: m[ci] > 0  # noqa: E731
    parent: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        if hit(m):
            run = []
            while parent[m] is not None:
                m, j = parent[m]
                run.append(net.transitions[j])
            return ReachResult(YES, tuple(reversed(run)), len(parent), _replay(net, source, reversed(run)))
        for j in order_idx:
            m2 = net.fire_tuple(m, j)
            if m2 is not None and m2 not in parent:
                if len(parent) >= node_budget:
                    return ReachResult(BUDGET_EXCEEDED, explored=len(parent))
                parent[m2] = (m, j)
                queue.append(m2)
    return ReachResult(NO_EXHAUSTIVE, explored=len(parent))


def _replay(net: PetriNet, source: Mapping[str, int], run: Iterable[str]) -> Marking:
    return fire_sequence(net, source, list(run))


def reachable_set_size(net: PetriNet, source: Mapping[str, int], node_budget: int = DEFAULT_NODE_BUDGET, order=None) -> int | None:
    """Number of reachable markings, or None when the budget runs out."""
    places = net.places
    start = Marking(source).to_tuple(places)
    order_idx = [net.transition_index[t] for t in (order or net.transitions)]
    seen = {start}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for j in order_idx:
            m2 = net.fire_tuple(m, j)
            if m2 is not None and m2 not in seen:
                if len(seen) >= node_budget:
                    return None
                seen.add(m2)
                queue.append(m2)
    return len(seen)


# ------------------------------------------------------------- cut-offs


@dataclass
class ParityWitnesses:
    """Smallest even and odd n with n*M ->* n*M' found by the sweep (None if absent)."""

    even: int | None
    odd: int | None
    search_limit: int
    status: dict[int, str] = field(default_factory=dict)
    runs: dict[int, tuple[str, ...]] = field(default_factory=dict)

    def reaches(self, n: int) -> bool | None:
        s = self.status.get(n)
        return None if s in (None, BUDGET_EXCEEDED) else s == YES

    def pair(self) -> int | None:
        """Smallest n with both n and n+1 reachable within the sweep."""
        for n in sorted(self.status):
            if self.reaches(n) and self.reaches(n + 1):
                return n
        return None

    @property
    def minimal_cutoff(self) -> int | None:
        """Observed cut-off: one more than the largest failing n, if the sweep settles it.

        Only meaningful as a lower bound on the true cut-off; None when some n
        was inconclusive or when the top of the sweep fails.
        """
        if not self.status or any(s == BUDGET_EXCEEDED for s in self.status.values()):
            return None
        if self.status[self.search_limit] != YES:
            return None
        failing = [n for n, s in self.status.items() if s != YES]
        if failing:
            return 1 + max(failing)
        # n = 0 always works, so a sweep from 1 without failures means cut-off 0
        low = min(self.status)
        return 0 if low <= 1 else low

    @property
    def exhaustive(self) -> bool:
        return all(s != BUDGET_EXCEEDED for s in self.status.values())


def semi_decide_cutoff(
    system: PetriNetSystem, n_max: int = DEFAULT_N_MAX, node_budget: int = DEFAULT_NODE_BUDGET, n_min: int = 1
) -> ParityWitnesses:
    """Sweep n = n_min..n_max and record which n*M ->* n*M' hold."""
    even = odd = None
    status, runs = {}, {}
    for n in range(n_min, n_max + 1):
        m0, m1 = system.scaled(n)
        result = bfs_reach(system.net, m0, m1, node_budget=node_budget)
        status[n] = result.status
        if result.found:
            runs[n] = result.run
            if n % 2 == 0 and even is None:
                even = n
            if n % 2 == 1 and odd is None:
                odd = n
    return ParityWitnesses(even, odd, n_max, status, runs)


# ------------------------------------------------------------ validation


def fire_sequence(net: PetriNet, start: Mapping[str, int], sequence: Sequence[str]) -> Marking:
    """Fire a plain sequence; raises DisabledAt(0, 1, position, t)."""
    return validate_rle_run(net, start, RleRun.of(sequence)) if sequence else Marking(start)


def _check_inputs(net: PetriNet, start: Mapping[str, int], run: RleRun) -> tuple[int, ...]:
    for p in start:
        if p not in net.place_index:
            raise ValidationError(f"marking mentions unknown place {p!r}")
    for seq, _ in run.blocks:
        for t in seq:
            if t not in net.transition_index:
                raise ValidationError(f"run mentions unknown transition {t!r}")
    return Marking(start).to_tuple(net.places)


def _simulate(net: PetriNet, m: list[int], seq_idx, block: int, iteration: int) -> None:
    pre, eff = net._pre_idx, net._effect_idx
    for q, j in enumerate(seq_idx):
        for i, w in pre[j]:
            if m[i] < w:
                raise DisabledAt(block, iteration, q, net.transitions[j])
        for i, v in eff[j]:
            m[i] += v


def validate_rle_run(
    net: PetriNet, start: Mapping[str, int], run: RleRun, expand_limit: int = EXPAND_LIMIT
) -> Marking:
    """Replay ``run`` from ``start`` and return the final marking.

    Blocks repeated more than ``expand_limit`` times are checked by the
    endpoint rule: the markings seen at a fixed position are affine in the
    iteration index, so it suffices to simulate the first and last iteration.
    """
    m = list(_check_inputs(net, start, run))
    for b, (seq, count) in enumerate(run.blocks):
        idx = [net.transition_index[t] for t in seq]
        if count <= expand_limit:
            for it in range(1, count + 1):
                _simulate(net, m, idx, b, it)
            continue
        delta = [0] * len(m)
        for j in idx:
            for i, v in net._effect_idx[j]:
                delta[i] += v
        first = list(m)
        try:
            _simulate(net, first, idx, b, 1)
            last = [a + (count - 1) * d for a, d in zip(m, delta)]
            if min(last, default=0) < 0:
                raise DisabledAt(b, count, 0, seq[0])
            _simulate(net, last, idx, b, count)
        except DisabledAt:
            raise _first_failure(net, m, idx, delta, b, count) from None
        m = last
    return Marking.from_tuple(net.places, m)


def _first_failure(net: PetriNet, m: list[int], idx: list[int], delta: list[int], block: int, count: int) -> DisabledAt:
    """Exact (iteration, position) of the first disabled firing within a long block."""
    pre, eff = net._pre_idx, net._effect_idx
    cur = list(m)
    best = None  # (iteration, position)
    for q, j in enumerate(idx):
        first_bad = None
        for i, w in pre[j]:
            if cur[i] < w:
                first_bad = 1
                break
            if delta[i] < 0:
                # smallest it with cur + (it-1) * delta < w
                it = (cur[i] - w) // (-delta[i]) + 2
                if it <= count and (first_bad is None or it < first_bad):
                    first_bad = it
        if first_bad is not None and (best is None or first_bad < best[0]):
            best = (first_bad, q)
        for i, v in eff[j]:
            cur[i] += v
    assert best is not None, "endpoint rule flagged a block that never fails"
    it, q = best
    return DisabledAt(block, it, q, net.transitions[idx[q]])


def validate_by_expansion(net: PetriNet, start: Mapping[str, int], run: RleRun) -> Marking:
    """Reference validator: expands every block."""
    m = list(_check_inputs(net, start, run))
    for b, (seq, count) in enumerate(run.blocks):
        idx = [net.transition_index[t] for t in seq]
        for it in range(1, count + 1):
            _simulate(net, m, idx, b, it)
    return Marking.from_tuple(net.places, m)
