"""Rendez-vous protocols, Petri nets, and the translations between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Mapping, NamedTuple

import networkx as nx

from .vectors import Marking, SolutionVector, SparseVector

SEND = "!"
RECEIVE = "?"


class ModelError(ValueError):
    """Raised when a protocol or net violates its structural invariants."""


class Rule(NamedTuple):
    source: str
    action: str  # "!" or "?"
    letter: str
    target: str

    def __str__(self) -> str:
        return f"{self.source} {self.action}{self.letter} {self.target}"

    def mirrored(self) -> Rule:
        return self._replace(action=RECEIVE if self.action == SEND else SEND)


def _check_unique(kind: str, names) -> None:
    seen = set()
    for name in names:
        if name in seen:
            raise ModelError(f"duplicate {kind} {name!r}")
        seen.add(name)


@dataclass(frozen=True)
class Protocol:
    """A rendez-vous protocol (Q, Sigma, init, fin, R)."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    init: str
    fin: str
    rules: tuple[Rule, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        rules = []
        for rule in self.rules:
            rule = Rule(*rule)
            if rule not in rules:
                rules.append(rule)
        object.__setattr__(self, "rules", tuple(rules))
        self._validate()

    def _validate(self) -> None:
        _check_unique("state", self.states)
        _check_unique("letter", self.alphabet)
        states, letters = set(self.states), set(self.alphabet)
        for name in (self.init, self.fin):
            if name not in states:
                raise ModelError(f"undeclared state {name!r}")
        for rule in self.rules:
            if rule.action not in (SEND, RECEIVE):
                raise ModelError(f"bad action {rule.action!r} in rule {rule}")
            for name in (rule.source, rule.target):
                if name not in states:
                    raise ModelError(f"undeclared state {name!r} in rule {rule}")
            if rule.letter not in letters:
                raise ModelError(f"undeclared letter {rule.letter!r} in rule {rule}")

    @property
    def is_symmetric(self) -> bool:
        rules = set(self.rules)
        return all(r.mirrored() in rules for r in rules)

    def graph(self) -> nx.DiGraph:
        """State graph: an edge q -> q' for every rule (q, ., q')."""
        g = nx.DiGraph()
        g.add_nodes_from(self.states)
        g.add_edges_from((r.source, r.target) for r in self.rules)
        return g


@dataclass(frozen=True)
class SymmetricProtocol(Protocol):
    """A protocol whose rule set is closed under swapping ``!a`` and ``?a``.

    Rules are stored in canonical order: for each (q, a, q') in order of first
    appearance, the send rule followed by the receive rule.
    """

    def __post_init__(self):
        super().__post_init__()
        if not self.is_symmetric:
            missing = next(r for r in self.rules if r.mirrored() not in set(self.rules))
            raise ModelError(f"symmetry violated: {missing} has no mirrored rule")
        ordered = []
        for triple in self.symmetric_rules:
            q, a, q2 = triple
            ordered += [Rule(q, SEND, a, q2), Rule(q, RECEIVE, a, q2)]
        object.__setattr__(self, "rules", tuple(ordered))

    @property
    def symmetric_rules(self) -> tuple[tuple[str, str, str], ...]:
        """Rules in shorthand form (q, a, q')."""
        seen = {}
        for r in self.rules:
            seen.setdefault((r.source, r.letter, r.target), None)
        return tuple(seen)

    @classmethod
    def from_triples(cls, states, alphabet, init, fin, triples) -> SymmetricProtocol:
        rules = []
        for q, a, q2 in triples:
            rules += [Rule(q, SEND, a, q2), Rule(q, RECEIVE, a, q2)]
        return cls(tuple(states), tuple(alphabet), init, fin, tuple(rules))


@dataclass(frozen=True)
class LeaderProtocolPair:
    """A symmetric leader protocol: one leader agent plus arbitrarily many followers."""

    leader: SymmetricProtocol
    follower: SymmetricProtocol

    def __post_init__(self):
        if set(self.leader.alphabet) != set(self.follower.alphabet):
            raise ModelError("leader and follower must share one alphabet")
        common = set(self.leader.states) & set(self.follower.states)
        if common:
            raise ModelError(f"leader and follower states overlap: {sorted(common)}")

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.leader.alphabet


# --------------------------------------------------------------------- nets


def _freeze(arcs: Mapping[str, Mapping[str, int]], transitions) -> Mapping:
    frozen = {}
    for t in transitions:
        row = {}
        for p, w in arcs.get(t, {}).items():
            if not isinstance(w, int) or isinstance(w, bool):
                raise ModelError(f"arc weight {w!r} on ({t}, {p}) is not an integer")
            if w < 0:
                raise ModelError(f"negative arc weight on ({t}, {p})")
            if w:
                row[p] = w
        frozen[t] = MappingProxyType(row)
    return MappingProxyType(frozen)


@dataclass(frozen=True, eq=False)
class PetriNet:
    """A Petri net (P, T, Pre, Post); arcs are stored per transition."""

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    pre: Mapping[str, Mapping[str, int]] = field(default_factory=dict)
    post: Mapping[str, Mapping[str, int]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        _check_unique("place", self.places)
        _check_unique("transition", self.transitions)
        overlap = set(self.places) & set(self.transitions)
        if overlap:
            raise ModelError(f"names used both as place and transition: {sorted(overlap)}")
        places, transitions = set(self.places), set(self.transitions)
        for arcs in (self.pre, self.post):
            for t, row in arcs.items():
                if t not in transitions:
                    raise ModelError(f"arc references undeclared transition {t!r}")
                for p in row:
                    if p not in places:
                        raise ModelError(f"arc references undeclared place {p!r}")
        object.__setattr__(self, "pre", _freeze(self.pre, self.transitions))
        object.__setattr__(self, "post", _freeze(self.post, self.transitions))

    def __eq__(self, other):
        if not isinstance(other, PetriNet):
            return NotImplemented
        return (
            self.places == other.places
            and self.transitions == other.transitions
            and all(dict(self.pre[t]) == dict(other.pre[t]) for t in self.transitions)
            and all(dict(self.post[t]) == dict(other.post[t]) for t in self.transitions)
        )

    __hash__ = None

    @cached_property
    def place_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    @cached_property
    def transition_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.transitions)}

    @cached_property
    def weight(self) -> int:
        return max(
            (w for arcs in (self.pre, self.post) for row in arcs.values() for w in row.values()),
            default=0,
        )

    @cached_property
    def incidence(self) -> list[list[int]]:
        """Incidence matrix Post - Pre as rows indexed by places."""
        rows = [[0] * len(self.transitions) for _ in self.places]
        for j, t in enumerate(self.transitions):
            for p, w in self.post[t].items():
                rows[self.place_index[p]][j] += w
            for p, w in self.pre[t].items():
                rows[self.place_index[p]][j] -= w
        return rows

    def effect(self, t: str) -> dict[str, int]:
        """Column of the incidence matrix for ``t`` (nonzero entries only)."""
        out: dict[str, int] = {}
        for p, w in self.post[t].items():
            out[p] = out.get(p, 0) + w
        for p, w in self.pre[t].items():
            out[p] = out.get(p, 0) - w
        return {p: v for p, v in out.items() if v}

    @cached_property
    def _pre_idx(self) -> list[tuple[tuple[int, int], ...]]:
        return [tuple((self.place_index[p], w) for p, w in self.pre[t].items()) for t in self.transitions]

    @cached_property
    def _effect_idx(self) -> list[tuple[tuple[int, int], ...]]:
        return [tuple((self.place_index[p], v) for p, v in self.effect(t).items()) for t in self.transitions]

    def preset(self, transitions) -> frozenset[str]:
        if isinstance(transitions, str):
            transitions = (transitions,)
        return frozenset(p for t in transitions for p in self.pre[t])

    def postset(self, transitions) -> frozenset[str]:
        if isinstance(transitions, str):
            transitions = (transitions,)
        return frozenset(p for t in transitions for p in self.post[t])

    def reverse(self) -> PetriNet:
        """The net with Pre and Post swapped."""
        return PetriNet(self.places, self.transitions, self.post, self.pre)

    def apply(self, marking: Mapping[str, int], vector: Mapping[str, object]) -> SolutionVector:
        """marking + A * vector (no enabledness check)."""
        out = dict(marking)
        for t, count in vector.items():
            for p, v in self.effect(t).items():
                out[p] = out.get(p, 0) + v * count
        return SolutionVector(out)

    def fire_tuple(self, marking: tuple[int, ...], j: int) -> tuple[int, ...] | None:
        """Fire transition index ``j`` on a tuple-encoded marking, or None if disabled."""
        for i, w in self._pre_idx[j]:
            if marking[i] < w:
                return None
        out = list(marking)
        for i, v in self._effect_idx[j]:
            out[i] += v
        return tuple(out)

    def marking(self, entries: Mapping[str, int] | None = None, **kw: int) -> Marking:
        m = Marking({**(entries or {}), **kw})
        for p in m:
            if p not in self.place_index:
                raise ModelError(f"marking references undeclared place {p!r}")
        return m


@dataclass(frozen=True)
class PetriNetSystem:
    """A net with an initial and a final marking."""

    net: PetriNet
    initial: Marking
    final: Marking

    def __post_init__(self):
        object.__setattr__(self, "initial", self.net.marking(self.initial))
        object.__setattr__(self, "final", self.net.marking(self.final))

    __hash__ = None

    def scaled(self, n: int) -> tuple[Marking, Marking]:
        return self.initial * n, self.final * n

    @property
    def delta(self) -> SolutionVector:
        return self.final - self.initial


@dataclass(frozen=True)
class LeaderNetAnnotation:
    """Classification of the transitions of a leader net.

    ``endpoints`` maps each leader transition to its (from, to) leader states.
    """

    endpoints: Mapping[str, tuple[str, str]]
    leader_states: tuple[str, ...]
    follower_states: tuple[str, ...]
    leader_init: str
    leader_fin: str
    follower_init: str
    follower_fin: str

    def kind(self, t: str) -> str:
        return "leader" if t in self.endpoints else "follower-only"

    def is_leader(self, t: str) -> bool:
        return t in self.endpoints

    def configuration(self, n: int, final: bool = False) -> Marking:
        """C_init^n (or C_fin^n): the leader plus n followers."""
        if final:
            return Marking([(self.leader_fin, 1), (self.follower_fin, n)])
        return Marking([(self.leader_init, 1), (self.follower_init, n)])


# ---------------------------------------------------------- translations


def _pair_transition(send: Rule, receive: Rule) -> tuple[dict[str, int], dict[str, int]]:
    pre: dict[str, int] = {}
    post: dict[str, int] = {}
    for p in (send.source, receive.source):
        pre[p] = pre.get(p, 0) + 1
    for p in (send.target, receive.target):
        post[p] = post.get(p, 0) + 1
    return pre, post


def _rule_pairs(rules: tuple[Rule, ...]):
    """All (index, send rule, index, receive rule) combinations sharing a letter."""
    for i, r in enumerate(rules):
        if r.action != SEND:
            continue
        for j, r2 in enumerate(rules):
            if r2.action == RECEIVE and r2.letter == r.letter:
                yield i, r, j, r2


def protocol_to_net(protocol: Protocol) -> PetriNetSystem:
    """The net N_P with one transition t_{r,r'} per matching send/receive pair.

    Transition ``t{i}_{j}`` pairs the send rule ``rules[i]`` with the receive
    rule ``rules[j]``. Initial marking is [init], final marking is [fin].
    """
    transitions, pre, post = [], {}, {}
    for i, send, j, receive in _rule_pairs(protocol.rules):
        name = f"t{i}_{j}"
        transitions.append(name)
        pre[name], post[name] = _pair_transition(send, receive)
    net = PetriNet(protocol.states, tuple(transitions), pre, post)
    return PetriNetSystem(net, Marking({protocol.init: 1}), Marking({protocol.fin: 1}))


def leader_to_net(pair: LeaderProtocolPair) -> tuple[PetriNetSystem, LeaderNetAnnotation]:
    """Net for a symmetric leader protocol; pairs of two leader rules are excluded.

    Leader rules are numbered first, then follower rules. The returned system
    has zero followers; use ``annotation.configuration(n)`` for n followers.
    """
    leader_rules = pair.leader.rules
    rules = leader_rules + pair.follower.rules
    n_leader = len(leader_rules)
    transitions, pre, post, endpoints = [], {}, {}, {}
    for i, send, j, receive in _rule_pairs(rules):
        send_lead, recv_lead = i < n_leader, j < n_leader
        if send_lead and recv_lead:
            continue
        name = f"t{i}_{j}"
        transitions.append(name)
        pre[name], post[name] = _pair_transition(send, receive)
        if send_lead:
            endpoints[name] = (send.source, send.target)
        elif recv_lead:
            endpoints[name] = (receive.source, receive.target)
    places = pair.leader.states + pair.follower.states
    net = PetriNet(places, tuple(transitions), pre, post)
    annotation = LeaderNetAnnotation(
        endpoints=MappingProxyType(endpoints),
        leader_states=pair.leader.states,
        follower_states=pair.follower.states,
        leader_init=pair.leader.init,
        leader_fin=pair.leader.fin,
        follower_init=pair.follower.init,
        follower_fin=pair.follower.fin,
    )
    system = PetriNetSystem(net, Marking({pair.leader.init: 1}), Marking({pair.leader.fin: 1}))
    return system, annotation


# ---------------------------------------------------------------- graphs


def net_graph(net: PetriNet) -> nx.DiGraph:
    """Bipartite graph over places and transitions with the arcs of the net."""
    g = nx.DiGraph()
    g.add_nodes_from(net.places, kind="place")
    g.add_nodes_from(net.transitions, kind="transition")
    for t in net.transitions:
        g.add_edges_from((p, t) for p in net.pre[t])
        g.add_edges_from((t, p) for p in net.post[t])
    return g


def is_acyclic(net: PetriNet) -> bool:
    return nx.is_directed_acyclic_graph(net_graph(net))


def marking_equation_holds(net: PetriNet, source: Mapping, target: Mapping, vector: SparseVector) -> bool:
    """Check target = source + A * vector exactly."""
    return net.apply(source, vector) == SolutionVector(target)
