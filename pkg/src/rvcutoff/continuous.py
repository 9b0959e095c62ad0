"""Continuous semantics: saturation, max-support solutions, reachability and coverability."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .exact import FEASIBLE, FIXED_ZERO, RATIONAL_NN, ExactSimplex, LinearSystem
from .model import PetriNet, PetriNetSystem
from .vectors import Marking, SolutionVector

FORWARD = "forward"
BACKWARD = "backward"


def saturation_sequence(
    net: PetriNet, marking: Mapping[str, int], allowed: Iterable[str] | None = None, direction: str = FORWARD
) -> list[str]:
    """Transitions of ``allowed`` in the order they become saturable from ``marking``.

    Each listed transition has all its input places (output places when
    ``direction`` is backward) marked by ``marking`` or by earlier transitions.
    """
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"unknown direction {direction!r}")
    needs, gives = (net.pre, net.post) if direction == FORWARD else (net.post, net.pre)
    allowed = None if allowed is None else set(allowed)
    pool = [t for t in net.transitions if allowed is None or t in allowed]
    marked = {p for p, v in marking.items() if v > 0}
    order: list[str] = []
    progress = True
    while progress:
        progress = False
        rest = []
        for t in pool:
            if all(p in marked for p in needs[t]):
                order.append(t)
                marked.update(gives[t])
                progress = True
            else:
                rest.append(t)
        pool = rest
    return order


def max_fireable(
    net: PetriNet, marking: Mapping[str, int], allowed: Iterable[str] | None = None, direction: str = FORWARD
) -> frozenset[str]:
    """Largest subset of ``allowed`` saturable from ``marking`` (forward or on the reverse net)."""
    return frozenset(saturation_sequence(net, marking, allowed, direction))


def marking_equation(net: PetriNet, delta: Mapping[str, int], restrict: Iterable[str] | None = None) -> LinearSystem:
    """``A v = delta`` with v >= 0 and v_t = 0 outside ``restrict``."""
    keep = set(net.transitions if restrict is None else restrict)
    tags = tuple(RATIONAL_NN if t in keep else FIXED_ZERO for t in net.transitions)
    return LinearSystem(
        tuple(map(tuple, net.incidence)), tuple(delta.get(p, 0) for p in net.places), tags, net.transitions
    )


def _max_support(simplex: ExactSimplex, candidates: list[int]) -> list[SolutionVector]:
    """Solutions whose supports jointly cover every candidate that can be positive.

    Repeatedly maximizes the sum of still-unwitnessed candidates; a zero
    optimum proves none of them can be positive.
    """
    names = simplex.system.names
    found = [simplex.solution()]
    seen = set(found[0].support)
    while True:
        open_ = [j for j in candidates if names[j] not in seen]
        if not open_:
            break
        result = simplex.maximize({j: 1 for j in open_})
        if result.status == FEASIBLE:
            if result.value == 0:
                break
            sol = result.solution
        else:
            sol = SolutionVector(result.solution + result.ray)
        found.append(sol)
        seen |= sol.support
    return found


def _average(solutions: list[SolutionVector]) -> SolutionVector:
    total = SolutionVector()
    for s in solutions:
        total = total + s
    return total / len(solutions)


def max_support_solution(
    net: PetriNet, delta: Mapping[str, int], restrict: Iterable[str] | None = None
) -> tuple[frozenset[str], SolutionVector] | None:
    """Maximum support of ``A v = delta, v >= 0`` inside ``restrict`` and one solution attaining it."""
    system = marking_equation(net, delta, restrict)
    simplex = ExactSimplex(system)
    if not simplex.feasible:
        return None
    candidates = [j for j, tag in enumerate(system.tags) if tag != FIXED_ZERO]
    x = _average(_max_support(simplex, candidates))
    return x.support, x


@dataclass(frozen=True)
class ContinuousCertificate:
    support: frozenset[str]
    solution: SolutionVector
    forward_ok: bool
    backward_ok: bool

    def verify_reach(self, system: PetriNetSystem) -> bool:
        net = system.net
        return (
            self.solution.support == self.support
            and self.solution.is_nonnegative()
            and net.apply(system.initial, self.solution) == SolutionVector(system.final)
            and max_fireable(net, system.initial, self.support) == self.support
            and max_fireable(net, system.final, self.support, BACKWARD) == self.support
        )

    def verify_cover(self, net: PetriNet, marking: Mapping[str, int], target: str) -> bool:
        reached = net.apply(marking, self.solution)
        return (
            self.solution.support == self.support
            and self.solution.is_nonnegative()
            and all(v >= 0 for v in reached.values())
            and reached[target] > 0
            and max_fireable(net, marking, self.support) == self.support
        )


def continuous_reachable(system: PetriNetSystem) -> ContinuousCertificate | None:
    """Decide M ->Q* M' by shrinking the candidate support to a fixpoint."""
    net, m0, m1 = system.net, system.initial, system.final
    if m0 == m1:
        return ContinuousCertificate(frozenset(), SolutionVector(), True, True)
    delta = system.delta
    support = max_fireable(net, m0) & max_fireable(net, m1, None, BACKWARD)
    while True:
        found = max_support_solution(net, delta, support)
        if found is None:
            return None
        best, x = found
        pruned = max_fireable(net, m0, best) & max_fireable(net, m1, best, BACKWARD)
        if pruned == best:
            return ContinuousCertificate(best, x, True, True)
        support = pruned


def coverability_system(net: PetriNet, marking: Mapping[str, int], restrict: Iterable[str] | None = None) -> LinearSystem:
    """``A v - s = -m`` over transitions v and one slack s_p per place (the reached marking)."""
    keep = set(net.transitions if restrict is None else restrict)
    n = len(net.transitions)
    rows = []
    for i, row in enumerate(net.incidence):
        slack = [0] * len(net.places)
        slack[i] = -1
        rows.append(tuple(row) + tuple(slack))
    tags = tuple(RATIONAL_NN if t in keep else FIXED_ZERO for t in net.transitions)
    tags += (RATIONAL_NN,) * len(net.places)
    names = net.transitions + tuple(f"<slack>{p}" for p in net.places)
    rhs = tuple(-marking.get(p, 0) for p in net.places)
    assert len(names) == n + len(net.places)
    return LinearSystem(tuple(rows), rhs, tags, names)


def continuous_coverable(net: PetriNet, marking: Mapping[str, int], target: str) -> ContinuousCertificate | None:
    """Decide whether a continuous run from ``marking`` puts positive mass on ``target``."""
    marking = Marking(marking)
    if marking[target] > 0:
        return ContinuousCertificate(frozenset(), SolutionVector(), True, True)
    n = len(net.transitions)
    support = max_fireable(net, marking)
    while True:
        system = coverability_system(net, marking, support)
        simplex = ExactSimplex(system)
        candidates = [j for j in range(n) if system.tags[j] != FIXED_ZERO]
        x = _average(_max_support(simplex, candidates))
        best = frozenset(t for t in x.support if t in net.transition_index)
        pruned = max_fireable(net, marking, best)
        if pruned == best:
            break
        support = pruned
    target_col = n + net.place_index[target]
    result = simplex.maximize(target_col)
    if result.status == FEASIBLE and result.value <= 0:
        return None
    hit = result.solution if result.status == FEASIBLE else SolutionVector(result.solution + result.ray)
    both = _average([x, hit])
    v = SolutionVector((t, c) for t, c in both.items() if t in net.transition_index)
    return ContinuousCertificate(v.support, v, True, False)
