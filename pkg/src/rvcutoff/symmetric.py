"""Symmetric protocols: the leaderless parity decision and the leader case."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import networkx as nx

from .cutoff import NO, YES, Decision, PreconditionError
from .exact import (
    BUDGET_EXCEEDED,
    DEFAULT_NODE_BUDGET,
    FIXED_ZERO,
    INTEGER,
    INTEGER_NN,
    RATIONAL_NN,
    ExactSimplex,
    F2System,
    LinearSystem,
    f2_solve,
    ilp_feasible,
    integer_solve,
)
from .model import LeaderNetAnnotation, LeaderProtocolPair, PetriNet, PetriNetSystem, SymmetricProtocol
from .model import leader_to_net, protocol_to_net
from .oracle import validate_rle_run
from .runs import RleRun
from .vectors import Marking, SolutionVector

INCONCLUSIVE = "inconclusive"
MAX_LEADER_EDGES = 20


class NotSymmetric(ValueError):
    pass


class GuardViolation(ValueError):
    pass


def _require_symmetric(p) -> None:
    if not isinstance(p, SymmetricProtocol) and not getattr(p, "is_symmetric", False):
        raise NotSymmetric("protocol is not symmetric")


def protocol_graph(p: SymmetricProtocol) -> nx.DiGraph:
    """G(P): an edge q -> q' for every rule (q, a, q')."""
    return p.graph()


def good_states(p: SymmetricProtocol) -> frozenset[str]:
    """States reachable from init and co-reachable to fin in G(P)."""
    g = protocol_graph(p)
    forward = nx.descendants(g, p.init) | {p.init}
    backward = nx.ancestors(g, p.fin) | {p.fin}
    return frozenset(forward & backward)


def parity_system(p: SymmetricProtocol, system: PetriNetSystem | None = None) -> tuple[F2System, tuple[str, ...]]:
    """Eq over GF(2): columns are transitions avoiding bad states; rows are states.

    The rhs is 1 at init and fin and 0 elsewhere.
    """
    system = system or protocol_to_net(p)
    net = system.net
    good = good_states(p)
    columns = tuple(
        t for t in net.transitions if (net.preset(t) | net.postset(t)) <= good
    )
    matrix = [[net.incidence[net.place_index[q]][net.transition_index[t]] for t in columns] for q in p.states]
    rhs = [1 if q in (p.init, p.fin) else 0 for q in p.states]
    return F2System.from_dense(matrix, rhs, columns), columns


def decide_symmetric_cutoff(p: SymmetricProtocol) -> Decision:
    """Cut-off for a leaderless symmetric protocol: init-fin path in G(P) and Eq solvable over GF(2)."""
    _require_symmetric(p)
    if p.init == p.fin:
        return Decision(YES, frozenset(), bound=0, notes=["init and fin coincide"], certificates={"path": [p.init]})
    g = protocol_graph(p)
    if not nx.has_path(g, p.init, p.fin):
        return Decision(NO, notes=["fin not reachable from init in the protocol graph"])
    path = nx.shortest_path(g, p.init, p.fin)
    eq, columns = parity_system(p)
    result = f2_solve(eq)
    if not result.feasible:
        return Decision(NO, notes=["no odd witness: Eq has no solution over GF(2)"], certificates={"path": path})
    bits = dict(zip(columns, result.solution))
    return Decision(
        YES,
        frozenset(t for t, b in bits.items() if b),
        certificates={"path": path, "f2": bits},
    )


def decide_symmetric_bounded_loss(p: SymmetricProtocol) -> Decision:
    """Bounded-loss cut-off of a symmetric protocol: fin reachable from init in G(P); bound 1."""
    _require_symmetric(p)
    g = protocol_graph(p)
    if not nx.has_path(g, p.init, p.fin):
        return Decision(NO, notes=["fin not reachable from init in the protocol graph"])
    return Decision(YES, bound=1, certificates={"path": nx.shortest_path(g, p.init, p.fin)})


def verify_f2_certificate(p: SymmetricProtocol, bits: Mapping[str, int]) -> bool:
    eq, columns = parity_system(p)
    return eq.satisfied_by([bits.get(t, 0) for t in columns])


# ---------------------------------------------------------------- leader


@dataclass(frozen=True)
class LeaderInstance:
    """Leader net restricted to follower states on init^F - fin^F paths."""

    pair: LeaderProtocolPair
    system: PetriNetSystem  # full net, zero followers
    annotation: LeaderNetAnnotation
    net: PetriNet  # restricted net
    edges: tuple[tuple[str, str], ...]
    edge_transitions: dict

    @classmethod
    def build(cls, pair: LeaderProtocolPair) -> LeaderInstance:
        system, ann = leader_to_net(pair)
        full = system.net
        keep = set(pair.leader.states) | good_states(pair.follower) | {ann.follower_init, ann.follower_fin}
        transitions = tuple(t for t in full.transitions if (full.preset(t) | full.postset(t)) <= keep)
        places = tuple(p for p in full.places if p in keep)
        net = PetriNet(
            places,
            transitions,
            {t: dict(full.pre[t]) for t in transitions},
            {t: dict(full.post[t]) for t in transitions},
        )
        edge_transitions: dict[tuple[str, str], list[str]] = {}
        for t in transitions:
            if ann.is_leader(t):
                edge_transitions.setdefault(ann.endpoints[t], []).append(t)
        return cls(pair, system, ann, net, tuple(edge_transitions), edge_transitions)


def _closed(edges, root: str) -> bool:
    """Every vertex of the edge graph reachable from ``root``."""
    if not edges:
        return True
    g = nx.DiGraph(list(edges))
    if root not in g:
        return False
    return len(nx.descendants(g, root)) + 1 == g.number_of_nodes()


def _reachable_edges(edges, root: str) -> set:
    g = nx.DiGraph(list(edges))
    if root not in g:
        return set()
    seen = nx.descendants(g, root) | {root}
    return {e for e in edges if e[0] in seen}


def leader_system(
    inst: LeaderInstance, par: int, include, exclude, tag: str = INTEGER_NN, support_scope: str = "leader"
) -> LinearSystem:
    """C_fin^n = C_init^n + A v with n = 2k + par, plus one `>= 1` row per included edge."""
    ann, net = inst.annotation, inst.net
    li, lf, fi, ff = ann.leader_init, ann.leader_fin, ann.follower_init, ann.follower_fin
    excluded = {t for e in exclude for t in inst.edge_transitions[e]}
    if support_scope == "all":
        excluded |= {t for t in net.transitions if not ann.is_leader(t)}
    columns: dict[str, dict] = {}
    tags: dict[str, str] = {}
    for t in net.transitions:
        columns[t] = net.effect(t)
        tags[t] = FIXED_ZERO if t in excluded else tag
    # delta = [fin^L] - [init^L] + (2k + par) ([fin^F] - [init^F])
    k_col: dict[str, int] = {}
    rhs: dict[str, int] = {}
    for q, sign in ((lf, 1), (li, -1)):
        rhs[q] = rhs.get(q, 0) + sign
    for q, sign in ((ff, 1), (fi, -1)):
        rhs[q] = rhs.get(q, 0) + sign * par
        k_col[q] = k_col.get(q, 0) - 2 * sign
    columns["<k>"] = k_col
    tags["<k>"] = tag
    rows = list(net.places)
    for e in include:
        row = f"<edge>{e[0]}->{e[1]}"
        rows.append(row)
        rhs[row] = 1
        for t in inst.edge_transitions[e]:
            columns[t] = {**columns[t], row: 1}
        columns[f"<slack>{row}"] = {row: -1}
        tags[f"<slack>{row}"] = tag
    return LinearSystem.from_columns(rows, columns, rhs, tags)


def _relaxation_feasible(system: LinearSystem) -> bool:
    relaxed = system.with_tags({n: RATIONAL_NN for n, t in zip(system.names, system.tags) if t != FIXED_ZERO})
    if not ExactSimplex(relaxed).feasible:
        return False
    lattice = system.with_tags({n: INTEGER for n, t in zip(system.names, system.tags) if t != FIXED_ZERO})
    return integer_solve(lattice).feasible


@dataclass
class ParitySearch:
    status: str  # yes | no | inconclusive
    edges: tuple = ()
    v: SolutionVector | None = None
    n: int | None = None
    nodes: int = 0


def _search_parity(inst: LeaderInstance, par: int, ilp_budget: int, support_scope: str) -> ParitySearch:
    root = inst.annotation.leader_init
    order = sorted(inst.edges, key=lambda e: (e[0] != root, inst.edges.index(e)))
    budget_hit = False
    nodes = 0

    def dfs(include: tuple, exclude: tuple, undecided: tuple) -> ParitySearch | None:
        nonlocal budget_hit, nodes
        nodes += 1
        live = _reachable_edges(include + undecided, root)
        if not set(include) <= live:
            return None
        dropped = tuple(e for e in undecided if e not in live)
        exclude = exclude + dropped
        undecided = tuple(e for e in undecided if e in live)
        system = leader_system(inst, par, include, exclude, support_scope=support_scope)
        if not _relaxation_feasible(system):
            return None
        if not undecided:
            if not _closed(include, root):
                return None
            result = ilp_feasible(system, ilp_budget)
            if result.status == BUDGET_EXCEEDED:
                budget_hit = True
                return None
            if not result.feasible:
                return None
            sol = result.solution
            v = SolutionVector((t, sol[t]) for t in inst.net.transitions if sol[t])
            return ParitySearch(YES, include, v, 2 * sol["<k>"] + par)
        e, rest = undecided[0], undecided[1:]
        return dfs(include + (e,), exclude, rest) or dfs(include, exclude + (e,), rest)

    found = dfs((), (), tuple(order))
    if found is not None:
        found.nodes = nodes
        return found
    return ParitySearch(INCONCLUSIVE if budget_hit else NO, nodes=nodes)


def decide_leader_cutoff(
    pair: LeaderProtocolPair,
    ilp_budget: int = DEFAULT_NODE_BUDGET,
    support_scope: str = "leader",
    max_edges: int = MAX_LEADER_EDGES,
) -> Decision:
    """Cut-off of a symmetric leader protocol: both parities need a compatible (S, v, n).

    ``support_scope='all'`` additionally forces follower-only transitions to zero.
    """
    if support_scope not in ("leader", "all"):
        raise ValueError("support_scope must be 'leader' or 'all'")
    inst = LeaderInstance.build(pair)
    if len(inst.edges) > max_edges:
        raise GuardViolation(f"{len(inst.edges)} distinct leader edges exceed the limit of {max_edges}")
    fol = pair.follower
    if fol.init != fol.fin and not nx.has_path(fol.graph(), fol.init, fol.fin):
        return Decision(NO, notes=["follower fin not reachable from follower init"])
    results = {}
    for par in (0, 1):
        res = _search_parity(inst, par, ilp_budget, support_scope)
        results[par] = res
        if res.status == NO:
            return Decision(
                NO,
                notes=[f"no compatible support for parity {par} ({res.nodes} search nodes)"],
                certificates={"leader": {p: _cert(r) for p, r in results.items()}},
            )
    certs = {p: _cert(r) for p, r in results.items()}
    if any(r.status == INCONCLUSIVE for r in results.values()):
        return Decision(INCONCLUSIVE, notes=["ILP budget exhausted"], certificates={"leader": certs})
    support = frozenset(t for r in results.values() for t in r.v.support if inst.annotation.is_leader(t))
    return Decision(YES, support, certificates={"leader": certs})


def _cert(r: ParitySearch) -> dict:
    return {"status": r.status, "edges": list(r.edges), "v": r.v, "n": r.n, "nodes": r.nodes}


def verify_leader_certificate(pair: LeaderProtocolPair, par: int, cert: Mapping) -> bool:
    """Marking equation, parity, edge support and reachability of G(S) from init^L."""
    system, ann = leader_to_net(pair)
    net = system.net
    v, n = SolutionVector(cert["v"]), cert["n"]
    if n is None or n % 2 != par or n < 0:
        return False
    if any(c < 0 or not isinstance(c, int) for c in v.values()):
        return False
    start, end = ann.configuration(n), ann.configuration(n, final=True)
    if net.apply(start, v) != SolutionVector(end):
        return False
    edges = {ann.endpoints[t] for t in v.support if ann.is_leader(t)}
    return edges == {tuple(e) for e in cert["edges"]} and _closed(edges, ann.leader_init)


# ---------------------------------------------------- compatible pairs


def is_compatible(net: PetriNet, ann: LeaderNetAnnotation, config: Mapping[str, int], x: Mapping[str, int]) -> bool:
    after = net.apply(config, x)
    if any(v < 0 for v in after.values()):
        return False
    lead = [q for q in ann.leader_states if config.get(q, 0) > 0]
    if len(lead) != 1:
        return False
    edges = {ann.endpoints[t] for t, c in x.items() if c > 0 and ann.is_leader(t)}
    return _closed(edges, lead[0])


def realize_compatible_run(
    net: PetriNet, ann: LeaderNetAnnotation, config: Mapping[str, int], x: Mapping[str, int]
) -> list[str]:
    """Firing sequence with Parikh image ``x`` from ``config`` (needs C(q) >= 2|x| on follower states)."""
    x = {t: c for t, c in x.items() if c}
    size = sum(x.values())
    for q in ann.follower_states:
        if q in net.place_index and config.get(q, 0) < 2 * size:
            raise PreconditionError(f"follower state {q} holds fewer than 2|x| = {2 * size} agents")
    if not is_compatible(net, ann, config, x):
        raise PreconditionError("configuration and vector are not compatible")
    m = list(Marking(config).to_tuple(net.places))
    seq: list[str] = []

    def fire(t: str) -> None:
        j = net.transition_index[t]
        m2 = net.fire_tuple(tuple(m), j)
        if m2 is None:
            raise PreconditionError(f"{t} not enabled while realizing the vector")
        m[:] = m2
        seq.append(t)
        x[t] -= 1
        if not x[t]:
            del x[t]

    while x:
        follower_only = next((t for t in net.transitions if t in x and not ann.is_leader(t)), None)
        if follower_only is not None:
            fire(follower_only)
            continue
        lead = next(q for q in ann.leader_states if m[net.place_index[q]] > 0)
        g = nx.DiGraph([ann.endpoints[t] for t in x])
        out = [t for t in net.transitions if t in x and ann.endpoints[t][0] == lead]
        on_cycle = [t for t in out if nx.has_path(g, ann.endpoints[t][1], lead)]
        if on_cycle:
            fire(on_cycle[0])
        elif len(out) == 1 and x[out[0]] == 1:
            fire(out[0])
        else:
            raise PreconditionError(f"leader at {lead} has no usable transition")
    return seq


def _pair_path(net: PetriNet, ann: LeaderNetAnnotation, source: str, target: str) -> list[str]:
    """Follower-only transitions moving two agents from ``source`` to ``target``."""
    g = nx.DiGraph()
    for t in net.transitions:
        if ann.is_leader(t):
            continue
        pre, post = dict(net.pre[t]), dict(net.post[t])
        if len(pre) == 1 and len(post) == 1 and list(pre.values()) == [2]:
            (p,), (q,) = pre, post
            if not g.has_edge(p, q):
                g.add_edge(p, q, t=t)
    path = nx.shortest_path(g, source, target)
    return [g.edges[a, b]["t"] for a, b in zip(path, path[1:])]


def build_leader_witness(pair: LeaderProtocolPair, v: Mapping[str, int], n: int) -> tuple[int, RleRun]:
    """Saturate, insert, desaturate: a run from C_init^k to C_fin^k with k = n + 2|v| |Q^F|."""
    inst = LeaderInstance.build(pair)
    net, ann = inst.system.net, inst.annotation
    size = sum(v.values())
    followers = [q for q in pair.follower.states if q in inst.net.place_index]
    k = n + 2 * size * len(followers)
    fi, ff = ann.follower_init, ann.follower_fin
    if size == 0:
        # v = 0 forces C_init^n = C_fin^n
        return k, RleRun()
    blocks = []
    config = dict(ann.configuration(n))
    for q in followers:
        if q != fi:
            blocks.append((tuple(_pair_path(net, ann, fi, q)), size))
        config[q] = config.get(q, 0) + 2 * size
    xi = realize_compatible_run(net, ann, config, v)
    blocks.append((tuple(xi), 1))
    for q in followers:
        if q != ff:
            blocks.append((tuple(_pair_path(net, ann, q, ff)), size))
    run = RleRun(tuple(blocks))
    end = validate_rle_run(net, ann.configuration(k), run)
    if end != ann.configuration(k, final=True):
        raise AssertionError("leader witness ends in the wrong configuration")
    return k, run
