"""Line-oriented text formats for protocols, nets, circuits, CNF and runs."""

from __future__ import annotations

import hashlib
from typing import Iterable, TextIO

from .model import (
    RECEIVE,
    SEND,
    LeaderProtocolPair,
    ModelError,
    PetriNet,
    PetriNetSystem,
    Protocol,
    Rule,
    SymmetricProtocol,
)
from .runs import RleRun
from .vectors import Marking


class ParseError(ModelError):
    """Malformed input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _read(text: str | TextIO) -> str:
    return text if isinstance(text, str) else text.read()


def _lines(text: str) -> Iterable[tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def _key_value(line: str, number: int) -> tuple[str, str]:
    if ":" not in line:
        raise ParseError(f"expected 'key: value', got {line!r}", number)
    key, value = line.split(":", 1)
    return key.strip().lower(), value.strip()


def _int(token: str, number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} {token!r} is not an integer", number) from None


def digest(text: str | bytes) -> str:
    data = text.encode() if isinstance(text, str) else text
    return "sha256:" + hashlib.sha256(data).hexdigest()


# ------------------------------------------------------------- protocols


class _ProtocolBlock:
    """Accumulates the fields of one protocol (or leader/follower) block."""

    def __init__(self, symmetric: bool, header_line: int):
        self.symmetric = symmetric
        self.header_line = header_line
        self.fields: dict[str, tuple[int, list[str]]] = {}
        self.rules: list[tuple[int, Rule]] = []
        self.triples: list[tuple[str, str, str]] = []
        self.in_rules = False

    def feed(self, number: int, line: str) -> None:
        if self.in_rules and ":" not in line:
            self._rule(number, line)
            return
        key, value = _key_value(line, number)
        if key == "rules":
            self.in_rules = True
            if value:
                self._rule(number, value)
            return
        if key not in ("states", "alphabet", "init", "fin"):
            raise ParseError(f"unknown field {key!r}", number)
        if key in self.fields:
            raise ParseError(f"duplicate declaration of {key!r}", number)
        self.in_rules = False
        self.fields[key] = (number, value.split())

    def _rule(self, number: int, line: str) -> None:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"rule must have 3 fields, got {line!r}", number)
        q, action, q2 = parts
        if action[0] in (SEND, RECEIVE) and len(action) > 1:
            self.rules.append((number, Rule(q, action[0], action[1:], q2)))
        elif self.symmetric:
            self.triples.append((q, action, q2))
            self.rules.append((number, Rule(q, SEND, action, q2)))
            self.rules.append((number, Rule(q, RECEIVE, action, q2)))
        else:
            raise ParseError(f"shorthand rule {line!r} only allowed in symmetric blocks", number)

    def single(self, key: str) -> str:
        if key not in self.fields:
            raise ParseError(f"missing {key!r} declaration", self.header_line)
        number, values = self.fields[key]
        if len(values) != 1:
            raise ParseError(f"{key!r} expects exactly one identifier", number)
        return values[0]

    def many(self, key: str, required: bool = True) -> tuple[str, ...]:
        if key not in self.fields:
            if required:
                raise ParseError(f"missing {key!r} declaration", self.header_line)
            return ()
        number, values = self.fields[key]
        if len(set(values)) != len(values):
            dup = next(v for v in values if values.count(v) > 1)
            raise ParseError(f"duplicate declaration of {dup!r}", number)
        return tuple(values)

    def build(self, alphabet: tuple[str, ...] | None = None) -> Protocol:
        states = self.many("states")
        if alphabet is None:
            alphabet = self.many("alphabet")
        known_states, known_letters = set(states), set(alphabet)
        for key in ("init", "fin"):
            name = self.single(key)
            if name not in known_states:
                raise ParseError(f"undeclared state {name!r}", self.fields[key][0])
        for number, rule in self.rules:
            for name in (rule.source, rule.target):
                if name not in known_states:
                    raise ParseError(f"undeclared state {name!r}", number)
            if rule.letter not in known_letters:
                raise ParseError(f"undeclared letter {rule.letter!r}", number)
        rules = tuple(r for _, r in self.rules)
        cls = SymmetricProtocol if self.symmetric else Protocol
        try:
            return cls(states, alphabet, self.single("init"), self.single("fin"), rules)
        except ModelError as exc:
            raise ParseError(str(exc), self.header_line) from None


def parse_protocol(text: str | TextIO) -> Protocol | SymmetricProtocol | LeaderProtocolPair:
    """Parse a ``[protocol]``, ``[symmetric-protocol]`` or ``[leader-protocol]`` file."""
    header = None
    block: _ProtocolBlock | None = None
    blocks: dict[str, _ProtocolBlock] = {}
    alphabet: tuple[str, ...] | None = None
    for number, line in _lines(_read(text)):
        if line.startswith("["):
            name = line.strip("[]").strip().lower()
            if header is None:
                if name not in ("protocol", "symmetric-protocol", "leader-protocol"):
                    raise ParseError(f"unknown header [{name}]", number)
                header = name
                if name != "leader-protocol":
                    block = _ProtocolBlock(name == "symmetric-protocol", number)
                continue
            if header != "leader-protocol" or name not in ("leader", "follower"):
                raise ParseError(f"unexpected section [{name}]", number)
            if name in blocks:
                raise ParseError(f"duplicate section [{name}]", number)
            block = blocks[name] = _ProtocolBlock(True, number)
            continue
        if header is None:
            raise ParseError("missing header", number)
        if block is None:
            key, value = _key_value(line, number)
            if key != "alphabet" or alphabet is not None:
                raise ParseError(f"unexpected {key!r} before [leader]/[follower]", number)
            alphabet = tuple(value.split())
            if len(set(alphabet)) != len(alphabet):
                raise ParseError("duplicate letter in alphabet", number)
            continue
        block.feed(number, line)
    if header is None:
        raise ParseError("empty input")
    if header != "leader-protocol":
        return block.build()
    if alphabet is None:
        raise ParseError("leader protocol needs an 'alphabet:' line")
    for name in ("leader", "follower"):
        if name not in blocks:
            raise ParseError(f"missing [{name}] section")
    leader = blocks["leader"].build(alphabet)
    follower = blocks["follower"].build(alphabet)
    try:
        return LeaderProtocolPair(leader, follower)
    except ModelError as exc:
        raise ParseError(str(exc)) from None


def _protocol_body(p: Protocol) -> list[str]:
    lines = [
        "states: " + " ".join(p.states),
        "init: " + p.init,
        "fin: " + p.fin,
        "rules:",
    ]
    if isinstance(p, SymmetricProtocol):
        lines += [f"  {q} {a} {q2}" for q, a, q2 in p.symmetric_rules]
    else:
        lines += [f"  {r}" for r in p.rules]
    return lines


def serialize_protocol(p: Protocol | LeaderProtocolPair) -> str:
    if isinstance(p, LeaderProtocolPair):
        lines = ["[leader-protocol]", "alphabet: " + " ".join(p.alphabet), "[leader]"]
        lines += _protocol_body(p.leader)
        lines.append("[follower]")
        lines += _protocol_body(p.follower)
    else:
        header = "[symmetric-protocol]" if isinstance(p, SymmetricProtocol) else "[protocol]"
        body = _protocol_body(p)
        lines = [header, body[0], "alphabet: " + " ".join(p.alphabet)] + body[1:]
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ nets


def parse_net(text: str | TextIO) -> PetriNetSystem:
    """Parse a ``[petrinet]`` file."""
    seen_header = False
    places: tuple[str, ...] | None = None
    transitions: tuple[str, ...] | None = None
    arcs = {"pre": {}, "post": {}}
    markings = {"initial": {}, "final": {}}
    pending = []
    for number, line in _lines(_read(text)):
        if line.startswith("["):
            if seen_header or line.strip("[]").strip().lower() != "petrinet":
                raise ParseError(f"unexpected section {line}", number)
            seen_header = True
            continue
        if not seen_header:
            raise ParseError("missing [petrinet] header", number)
        key, value = _key_value(line, number)
        if key in ("places", "transitions"):
            names = tuple(value.split())
            if len(set(names)) != len(names):
                dup = next(v for v in names if names.count(v) > 1)
                raise ParseError(f"duplicate declaration of {dup!r}", number)
            if key == "places":
                if places is not None:
                    raise ParseError("duplicate 'places:' line", number)
                places = names
            else:
                if transitions is not None:
                    raise ParseError("duplicate 'transitions:' line", number)
                transitions = names
        elif key in arcs:
            parts = value.split()
            if len(parts) != 3:
                raise ParseError(f"arc must be 't p w', got {value!r}", number)
            t, p, w = parts
            w = _int(w, number, "weight")
            if w < 0:
                raise ParseError(f"negative weight {w}", number)
            pending.append((number, "transition", t))
            pending.append((number, "place", p))
            row = arcs[key].setdefault(t, {})
            if p in row:
                raise ParseError(f"duplicate {key} arc ({t}, {p})", number)
            row[p] = w
        elif key in markings:
            parts = value.split()
            if len(parts) != 2:
                raise ParseError(f"marking entry must be 'p n', got {value!r}", number)
            p, n = parts
            n = _int(n, number, "token count")
            if n < 0:
                raise ParseError(f"negative token count {n}", number)
            pending.append((number, "place", p))
            if p in markings[key]:
                raise ParseError(f"duplicate {key} entry for {p!r}", number)
            markings[key][p] = n
        else:
            raise ParseError(f"unknown field {key!r}", number)
    if not seen_header:
        raise ParseError("missing [petrinet] header")
    places = places or ()
    transitions = transitions or ()
    known = {"place": set(places), "transition": set(transitions)}
    for number, kind, name in pending:
        if name not in known[kind]:
            raise ParseError(f"undeclared {kind} {name!r}", number)
    try:
        net = PetriNet(places, transitions, arcs["pre"], arcs["post"])
        return PetriNetSystem(net, Marking(markings["initial"]), Marking(markings["final"]))
    except (ModelError, ValueError) as exc:
        raise ParseError(str(exc)) from None


def serialize_net(system: PetriNetSystem) -> str:
    net = system.net
    lines = [
        "[petrinet]",
        "places: " + " ".join(net.places),
        "transitions: " + " ".join(net.transitions),
    ]
    for t in net.transitions:
        lines += [f"pre: {t} {p} {w}" for p, w in net.pre[t].items()]
        lines += [f"post: {t} {p} {w}" for p, w in net.post[t].items()]
    for key, marking in (("initial", system.initial), ("final", system.final)):
        lines += [f"{key}: {p} {marking[p]}" for p in net.places if marking[p]]
    return "\n".join(lines) + "\n"


def parse_any(text: str) -> Protocol | LeaderProtocolPair | PetriNetSystem:
    """Dispatch on the first section header."""
    for number, line in _lines(text):
        if line.lower().startswith("[petrinet"):
            return parse_net(text)
        return parse_protocol(text)
    raise ParseError("empty input")


# ------------------------------------------------------------------ runs


def parse_run(text: str | TextIO):
    """Parse a run file: ``[run]``, optional ``start: p n`` lines, ``run: r t1 t2 ...`` blocks."""
    seen_header = False
    start: dict[str, int] = {}
    blocks = []
    for number, line in _lines(_read(text)):
        if line.startswith("["):
            if seen_header or line.strip("[]").strip().lower() != "run":
                raise ParseError(f"unexpected section {line}", number)
            seen_header = True
            continue
        if not seen_header:
            raise ParseError("missing [run] header", number)
        key, value = _key_value(line, number)
        parts = value.split()
        if key == "start":
            if len(parts) != 2:
                raise ParseError("start entry must be 'p n'", number)
            start[parts[0]] = _int(parts[1], number, "token count")
        elif key == "run":
            if len(parts) < 2:
                raise ParseError("run block must be 'count t1 t2 ...'", number)
            count = _int(parts[0], number, "repetition count")
            if count < 1:
                raise ParseError("repetition count must be positive", number)
            blocks.append((tuple(parts[1:]), count))
        else:
            raise ParseError(f"unknown field {key!r}", number)
    if not seen_header:
        raise ParseError("missing [run] header")
    try:
        start_marking = Marking(start) if start else None
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return start_marking, RleRun(tuple(blocks))


def serialize_run(run: RleRun, start: Marking | None = None) -> str:
    lines = ["[run]"]
    if start is not None:
        lines += [f"start: {p} {n}" for p, n in start.items()]
    lines += [f"run: {count} " + " ".join(seq) for seq, count in run.blocks]
    return "\n".join(lines) + "\n"
