"""Cut-off and bounded-loss cut-off decisions, explicit bounds, and witness runs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .continuous import (
    BACKWARD,
    ContinuousCertificate,
    continuous_coverable,
    continuous_reachable,
    marking_equation,
    max_fireable,
    max_support_solution,
    saturation_sequence,
)
from .exact import INTEGER, integer_solve, lp_solve
from .model import PetriNet, PetriNetSystem, Protocol, is_acyclic, protocol_to_net
from .oracle import validate_rle_run
from .runs import RleRun
from .vectors import Marking, SolutionVector

YES = "yes"
NO = "no"
DEFAULT_STEP_BUDGET = 10**6


class NotAcyclic(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass
class Decision:
    """Answer plus the certificates that justify it."""

    answer: str
    support: frozenset[str] | None = None
    rational_solution: SolutionVector | None = None
    integer_solution: SolutionVector | None = None
    bound: int | None = None
    notes: list[str] = field(default_factory=list)
    certificates: dict = field(default_factory=dict)

    @property
    def yes(self) -> bool:
        return self.answer == YES


@dataclass(frozen=True)
class TooLarge:
    """Witness not materialized: its expanded length exceeds the step budget."""

    params: ScalingParams | None
    length: int
    budget: int


# ------------------------------------------------------------ decisions


def _integer_solution(net: PetriNet, delta: Mapping[str, int], support) -> SolutionVector | None:
    system = marking_equation(net, delta, support).with_tags(
        {t: INTEGER for t in net.transitions if t in support}
    )
    result = integer_solve(system)
    return result.solution if result.feasible else None


def _trivial_yes(system: PetriNetSystem) -> Decision:
    return Decision(
        YES, frozenset(), SolutionVector(), SolutionVector(), 0, ["initial and final markings coincide"],
        {"continuous": ContinuousCertificate(frozenset(), SolutionVector(), True, True)},
    )


def decide_cutoff_acyclic(system: PetriNetSystem) -> Decision:
    """Acyclic nets: max-support rational solution plus an integer solution inside its support."""
    net = system.net
    if not is_acyclic(net):
        raise NotAcyclic("net has a directed cycle")
    if system.initial == system.final:
        return _trivial_yes(system)
    found = max_support_solution(net, system.delta)
    if found is None:
        return Decision(NO, notes=["marking equation has no nonnegative rational solution"])
    support, x = found
    y = _integer_solution(net, system.delta, support)
    if y is None:
        return Decision(NO, support, x, notes=["no integer solution inside the maximal support"])
    cert = ContinuousCertificate(
        support,
        x,
        max_fireable(net, system.initial, support) == support,
        max_fireable(net, system.final, support, BACKWARD) == support,
    )
    bound = compute_cutoff_bound(system, cert, y)
    return Decision(YES, support, x, y, bound, certificates={"continuous": cert})


def decide_cutoff(system: PetriNetSystem) -> Decision:
    """General nets: continuous reachability certificate plus an integer solution inside its support."""
    if system.initial == system.final:
        return _trivial_yes(system)
    cert = continuous_reachable(system)
    if cert is None:
        return Decision(NO, notes=["final marking not reachable in the continuous semantics"])
    y = _integer_solution(system.net, system.delta, cert.support)
    if y is None:
        return Decision(
            NO, cert.support, cert.solution, notes=["no integer solution inside the maximal support"],
            certificates={"continuous": cert},
        )
    bound = compute_cutoff_bound(system, cert, y)
    return Decision(YES, cert.support, cert.solution, y, bound, certificates={"continuous": cert})


def decide_bounded_loss(protocol: Protocol) -> Decision:
    """Bounded-loss cut-off for a protocol: coverability of fin plus a rational solution inside its support.

    ``rational_solution`` holds the nonnegative solution y; no integer solution is involved.
    """
    if not isinstance(protocol, Protocol):
        raise TypeError("bounded-loss analysis is defined for rendez-vous protocols only")
    system = protocol_to_net(protocol)
    net = system.net
    if protocol.init == protocol.fin:
        return Decision(YES, frozenset(), SolutionVector(), None, 0, ["init and fin coincide"])
    cover = continuous_coverable(net, system.initial, protocol.fin)
    if cover is None:
        return Decision(NO, notes=["fin cannot be covered in the continuous semantics"])
    result = lp_solve(marking_equation(net, system.delta, cover.support))
    if not result.feasible:
        return Decision(
            NO, cover.support, notes=["no nonnegative rational solution inside the coverable support"],
            certificates={"cover": cover, "farkas": result.certificate},
        )
    return Decision(YES, cover.support, result.solution, certificates={"cover": cover})


# ------------------------------------------------------------------ bound


@dataclass(frozen=True)
class ScalingParams:
    w: int
    m: int
    k: int
    ell: Fraction
    beta: int
    gamma: int
    scale_N: int

    @property
    def length(self) -> int:
        """Expanded length of the scaling witness: scale_N * ell."""
        return int(self.scale_N * self.ell)


def scaling_params(net: PetriNet, x: SolutionVector) -> ScalingParams:
    w = net.weight
    m = len(x.support)
    k = x.denominator_lcm()
    ell = Fraction(x.norm())
    k_ell = int(k * ell)
    beta = (w + 1) ** m
    gamma = 4 * w * beta * k_ell
    return ScalingParams(w, m, k, ell, beta, gamma, 4 * k * beta * gamma)


def insertion_factor(net: PetriNet, base_parikh: Mapping[str, int], y: Mapping[str, int]) -> int:
    """mu = |y| * (|x| * n * w + n * w + 1) with n the number of input places of supp(x)."""
    lam_x = sum(base_parikh.values())
    lam_y = sum(abs(v) for v in y.values())
    n_p = len(net.preset([t for t, v in base_parikh.items() if v]))
    w = net.weight
    return lam_y * (lam_x * n_p * w + n_p * w + 1)


def compute_cutoff_bound(system: PetriNetSystem, cert: ContinuousCertificate, y: SolutionVector) -> int:
    """B = (mu * N)^2 where N scales the continuous run to a discrete one and mu inserts y."""
    if system.initial == system.final or not cert.support:
        return 0
    if not y.support <= cert.support:
        raise PreconditionError("integer solution must lie inside the certificate support")
    net = system.net
    params = scaling_params(net, cert.solution)
    n_p = len(net.preset(cert.support))
    lam_y = y.norm()
    mu = lam_y * (params.length * n_p * params.w + n_p * params.w + 1)
    return (mu * params.scale_N) ** 2


# -------------------------------------------------------------- witnesses


def _layered(seq: Sequence[str], beta_of) -> list[tuple[tuple[str, ...], int]]:
    """t_1^{beta_{m-1}} ... t_m^{beta_0} as blocks, each count scaled by ``beta_of``."""
    m = len(seq)
    return [((t,), beta_of(m - 1 - i)) for i, t in enumerate(seq)]


def build_scaling_witness(
    system: PetriNetSystem, cert: ContinuousCertificate, step_budget: int = DEFAULT_STEP_BUDGET,
    params: ScalingParams | None = None,
) -> RleRun | TooLarge:
    """Run from N*M to N*M' in three stages: saturate, iterate the middle block, desaturate."""
    if not cert.support:
        if system.initial != system.final:
            raise PreconditionError("empty support only certifies M = M'")
        return RleRun()
    net = system.net
    x = cert.solution
    params = params or scaling_params(net, x)
    if params.length > step_budget:
        return TooLarge(params, params.length, step_budget)
    w, gamma = params.w, params.gamma
    forward = saturation_sequence(net, system.initial, cert.support)
    backward = saturation_sequence(net, system.final, cert.support, BACKWARD)
    if set(forward) != cert.support or set(backward) != cert.support:
        raise PreconditionError("certificate support is not saturable in both directions")
    stage1 = _layered(forward, lambda i: (w + 1) ** i * gamma)
    stage3 = list(reversed(_layered(backward, lambda i: (w + 1) ** i * gamma)))
    tau1 = {t: (w + 1) ** (len(forward) - 1 - i) for i, t in enumerate(forward)}
    tau2 = {t: (w + 1) ** (len(backward) - 1 - i) for i, t in enumerate(backward)}
    scale = 4 * params.beta * params.k
    v = {t: int(scale * x[t]) - tau1[t] - tau2[t] for t in cert.support}
    if any(c < 0 for c in v.values()):
        raise PreconditionError("middle block would need a negative count")
    middle = tuple(t for t in net.transitions for _ in range(v.get(t, 0)))
    run = RleRun(tuple(stage1) + ((middle, gamma),) + tuple(stage3)).merged()
    return run


def _marking_list(net: PetriNet, m: Mapping[str, int]) -> list[int]:
    return list(Marking(m).to_tuple(net.places))


def _prefix_with_token(net: PetriNet, start: Mapping[str, int], run: RleRun, place: str):
    """Blocks of a prefix of ``run`` after which ``place`` holds a token (and the matching suffix).

    The marking at a fixed position of a repeated block is affine in the
    iteration, so the first and last iteration cover every candidate.
    """
    pi = net.place_index[place]
    m = _marking_list(net, start)
    for b, (seq, count) in enumerate(run.blocks):
        idx = [net.transition_index[t] for t in seq]
        delta = [0] * len(m)
        for j in idx:
            for i, v in net._effect_idx[j]:
                delta[i] += v
        for it in sorted({1, count}):
            cur = [a + (it - 1) * d for a, d in zip(m, delta)]
            for q, j in enumerate(idx):
                if cur[pi] > 0:
                    head = list(run.blocks[:b])
                    if it > 1:
                        head.append((seq, it - 1))
                    head.append((seq[:q], 1))
                    tail = [(seq[q:], 1)]
                    if count - it:
                        tail.append((seq, count - it))
                    tail += list(run.blocks[b + 1:])
                    return RleRun(tuple(head)), RleRun(tuple(tail))
                for i, v in net._effect_idx[j]:
                    cur[i] += v
        m = [a + count * d for a, d in zip(m, delta)]
    raise PreconditionError(f"place {place!r} is never marked along the base run")


def build_insertion_witness(
    net: PetriNet,
    start: Mapping[str, int],
    base_run: RleRun | Sequence[str],
    y: Mapping[str, int],
    L: Mapping[str, int],
    L_prime: Mapping[str, int],
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> tuple[int, RleRun] | TooLarge:
    """Run from mu*M + L to mu*M' + L' where ``base_run`` leads from M = ``start`` to M'.

    Returns (mu, run). The budget counts stored steps (sum of block lengths),
    since the expanded length grows with mu.
    """
    if not isinstance(base_run, RleRun):
        base_run = RleRun.of(base_run)
    y = SolutionVector(y)
    x = base_run.parikh()
    if not y.support <= x.support:
        raise PreconditionError("supp(y) must be contained in the support of the base run")
    if net.apply(L, y) != SolutionVector(L_prime):
        raise PreconditionError("L' must equal L + A y")
    mu = insertion_factor(net, x, y)
    if mu == 0:
        return 0, RleRun()
    w = net.weight
    lam_x, lam_y = x.norm(), y.norm()
    copies = lam_x * lam_y * w + lam_y * w
    places = sorted(net.preset(x.support), key=net.place_index.get)
    pieces = [_prefix_with_token(net, start, base_run, p) for p in places]
    blocks = []
    for head, _ in pieces:
        blocks += head.scaled(copies).blocks
    xi = lam_y * x + y
    blocks += [((t,), xi[t]) for t in net.transitions if xi[t] > 0]
    for _, tail in pieces:
        blocks += tail.scaled(copies).blocks
    run = RleRun(tuple(blocks))
    if run.stored_steps > step_budget:
        return TooLarge(None, run.stored_steps, step_budget)
    return mu, run


def check_witness(net: PetriNet, start: Mapping[str, int], run: RleRun, end: Mapping[str, int]) -> bool:
    return validate_rle_run(net, start, run) == Marking(end)
