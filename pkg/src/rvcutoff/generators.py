"""Instance generators: reductions from CVP and 3-SAT, random instances, a small catalog."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import TextIO

from .io import ParseError, _key_value, _lines, _read, parse_net
from .model import (
    RECEIVE,
    SEND,
    LeaderProtocolPair,
    PetriNet,
    PetriNetSystem,
    Protocol,
    Rule,
    SymmetricProtocol,
)
from .runs import RleRun
from .vectors import Marking

AND, OR, NOT = "and", "or", "not"
SAT, UNSAT = "sat", "unsat"
MAX_SAT_VARIABLES = 20


class GuardViolation(ValueError):
    pass


# ---------------------------------------------------------------- circuits


@dataclass(frozen=True)
class Gate:
    name: str
    op: str
    operands: tuple[str, ...]


@dataclass(frozen=True)
class Circuit:
    """Inputs with their assigned bits, gates in topological order, and the output gate."""

    inputs: tuple[tuple[str, int], ...]
    gates: tuple[Gate, ...]
    output: str

    def __post_init__(self):
        known = set()
        for name, bit in self.inputs:
            if bit not in (0, 1):
                raise ValueError(f"input {name} must be 0 or 1")
            if name in known:
                raise ValueError(f"duplicate identifier {name}")
            known.add(name)
        for g in self.gates:
            arity = 1 if g.op == NOT else 2
            if g.op not in (AND, OR, NOT) or len(g.operands) != arity:
                raise ValueError(f"gate {g.name}: bad operation or operand count")
            for s in g.operands:
                if s not in known:
                    raise ValueError(f"gate {g.name} uses {s} before it is defined")
            if g.name in known:
                raise ValueError(f"duplicate identifier {g.name}")
            known.add(g.name)
        if self.output not in {g.name for g in self.gates}:
            raise ValueError(f"output {self.output} is not a gate")


def eval_circuit(c: Circuit) -> int:
    value = dict(c.inputs)
    for g in c.gates:
        bits = [value[s] for s in g.operands]
        if g.op == AND:
            value[g.name] = bits[0] & bits[1]
        elif g.op == OR:
            value[g.name] = bits[0] | bits[1]
        else:
            value[g.name] = 1 - bits[0]
    return value[c.output]


def parse_circuit(text: str | TextIO) -> Circuit:
    """``[circuit]``, ``inputs: x1=1 x2=0``, gate lines ``g1 = and x1 x2``, ``output: g1``."""
    inputs, gates, output, header = [], [], None, False
    for number, line in _lines(_read(text)):
        if line.startswith("["):
            if header or line.strip("[]").strip().lower() != "circuit":
                raise ParseError(f"unexpected section {line}", number)
            header = True
            continue
        if not header:
            raise ParseError("missing [circuit] header", number)
        if "=" in line and ":" not in line:
            name, _, rhs = line.partition("=")
            parts = rhs.split()
            if not parts:
                raise ParseError("gate needs an operation", number)
            gates.append(Gate(name.strip(), parts[0].lower(), tuple(parts[1:])))
            continue
        key, value = _key_value(line, number)
        if key == "inputs":
            for item in value.split():
                name, _, bit = item.partition("=")
                if bit not in ("0", "1"):
                    raise ParseError(f"input assignment {item!r} must be name=0 or name=1", number)
                inputs.append((name, int(bit)))
        elif key == "output":
            output = value.strip()
        else:
            raise ParseError(f"unknown field {key!r}", number)
    if output is None:
        raise ParseError("missing output line")
    try:
        return Circuit(tuple(inputs), tuple(gates), output)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_circuit(c: Circuit) -> str:
    lines = ["[circuit]", "inputs: " + " ".join(f"{n}={b}" for n, b in c.inputs)]
    lines += [f"{g.name} = {g.op} {' '.join(g.operands)}" for g in c.gates]
    lines.append(f"output: {c.output}")
    return "\n".join(lines) + "\n"


def gen_cvp_protocol(c: Circuit) -> Protocol:
    """Protocol with a cut-off iff the circuit evaluates to 1."""

    def q(h: str, b: int) -> str:
        return f"q_{h}_{b}"

    ids = [n for n, _ in c.inputs] + [g.name for g in c.gates]
    states = ("init", "fin") + tuple(q(h, b) for h in ids for b in (0, 1))
    letters = ["a", "b", "c"]
    rules: list[Rule] = []

    def both(src: str, letter: str, dst: str) -> None:
        rules.extend([Rule(src, SEND, letter, dst), Rule(src, RECEIVE, letter, dst)])

    for name, bit in c.inputs:
        both("init", "a", q(name, bit))
    for g in c.gates:
        if g.op == NOT:
            for b in (0, 1):
                letter = f"{g.name}_{b}"
                letters.append(letter)
                both(q(g.operands[0], b), letter, q(g.name, 1 - b))
            continue
        s1, s2 = g.operands
        for b1, b2 in itertools.product((0, 1), repeat=2):
            out = b1 & b2 if g.op == AND else b1 | b2
            letter = f"{g.name}_{b1}{b2}"
            letters.append(letter)
            rules.append(Rule(q(s1, b1), SEND, letter, q(g.name, out)))
            rules.append(Rule(q(s2, b2), RECEIVE, letter, q(g.name, out)))
    both(q(c.output, 1), "b", "fin")
    rules.append(Rule("fin", SEND, "c", "fin"))
    rules += [Rule(s, RECEIVE, "c", "fin") for s in states]
    return Protocol(states, tuple(letters), "init", "fin", tuple(rules))


def random_circuit(rng: random.Random, max_inputs: int = 3, max_gates: int = 8) -> Circuit:
    n = rng.randint(1, max_inputs)
    inputs = tuple((f"x{i}", rng.randint(0, 1)) for i in range(1, n + 1))
    pool = [name for name, _ in inputs]
    gates = []
    for j in range(1, rng.randint(1, max_gates) + 1):
        op = rng.choice((AND, OR, NOT))
        operands = (rng.choice(pool),) if op == NOT else (rng.choice(pool), rng.choice(pool))
        gates.append(Gate(f"g{j}", op, operands))
        pool.append(f"g{j}")
    return Circuit(inputs, tuple(gates), gates[-1].name)


# ------------------------------------------------------------------- 3-SAT


@dataclass(frozen=True)
class CnfFormula:
    """Clauses of exactly three nonzero literals over variables 1..n (DIMACS signs)."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} must have exactly three literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise ValueError(f"literal {lit} out of range 1..{self.n}")


def sat_brute_force(f: CnfFormula) -> str:
    if f.n > MAX_SAT_VARIABLES:
        raise GuardViolation(f"{f.n} variables exceed the limit of {MAX_SAT_VARIABLES}")
    for bits in itertools.product((False, True), repeat=f.n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in f.clauses):
            return SAT
    return UNSAT


def parse_dimacs(text: str | TextIO) -> CnfFormula:
    n = None
    clauses, pending = [], []
    for number, raw in enumerate(_read(text).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("header must read 'p cnf <vars> <clauses>'", number)
            n = int(parts[2])
            continue
        if n is None:
            raise ParseError("clause before the 'p cnf' header", number)
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-integer literal in {line!r}", number) from None
        for lit in lits:
            if lit == 0:
                if len(pending) != 3:
                    raise ParseError("every clause needs exactly three literals", number)
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if n is None:
        raise ParseError("missing 'p cnf' header")
    if pending:
        raise ParseError("last clause is not 0-terminated")
    try:
        return CnfFormula(n, tuple(clauses))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.n} {len(f.clauses)}"] + [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def gen_3sat_leader_protocol(f: CnfFormula) -> LeaderProtocolPair:
    """Leader walks p_0 -> p_n choosing top_j or bot_j; clause letters loop on the literals they contain."""
    n, m = f.n, len(f.clauses)
    letters = ("a",) + tuple(f"c{j}" for j in range(1, m + 1))
    lead_states = tuple(f"p{j}" for j in range(n + 1))
    lead_states += tuple(f"{side}{j}" for j in range(1, n + 1) for side in ("top", "bot"))
    triples = []
    for j in range(n):
        for side in ("top", "bot"):
            triples.append((f"p{j}", "a", f"{side}{j + 1}"))
            triples.append((f"{side}{j + 1}", "a", f"p{j + 1}"))
    for k, clause in enumerate(f.clauses, 1):
        for lit in dict.fromkeys(clause):
            side = "top" if lit > 0 else "bot"
            triples.append((f"{side}{abs(lit)}", f"c{k}", f"{side}{abs(lit)}"))
    leader = SymmetricProtocol.from_triples(lead_states, letters, "p0", f"p{n}", triples)
    fol_states = tuple(f"q{j}" for j in range(m + 1))
    fol = [(f"q{j}", f"c{j + 1}", f"q{j + 1}") for j in range(m)] + [("q0", "a", f"q{m}")]
    follower = SymmetricProtocol.from_triples(fol_states, letters, "q0", f"q{m}", fol)
    return LeaderProtocolPair(leader, follower)


def random_formula(rng: random.Random, max_vars: int = 3, max_clauses: int = 4) -> CnfFormula:
    n = rng.randint(1, max_vars)
    clauses = tuple(
        tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(3))
        for _ in range(rng.randint(1, max_clauses))
    )
    return CnfFormula(n, clauses)


# ------------------------------------------------------------------ random


def gen_random_protocol(
    max_states: int = 4, max_letters: int = 2, max_rules: int = 6, symmetric: bool = False, seed: int = 0
) -> Protocol:
    """Seeded random protocol with init != fin; symmetric mode emits rules in mirrored pairs."""
    if max_states < 2 or max_letters < 1 or max_rules < 0:
        raise ValueError("need at least two states, one letter and a nonnegative rule count")
    rng = random.Random(seed)
    states = tuple(f"s{i}" for i in range(rng.randint(2, max_states)))
    alphabet = tuple("abcdefghij"[i] if i < 10 else f"l{i}" for i in range(rng.randint(1, max_letters)))
    init, fin = states[0], states[1]
    if symmetric:
        triples = [
            (rng.choice(states), rng.choice(alphabet), rng.choice(states))
            for _ in range(rng.randint(min(1, max_rules // 2), max_rules // 2))
        ]
        return SymmetricProtocol.from_triples(states, alphabet, init, fin, triples)
    count = rng.randint(min(2, max_rules), max_rules)
    rules = []
    for i in range(count):
        action = (SEND, RECEIVE)[i] if i < 2 else rng.choice((SEND, RECEIVE))
        letter = alphabet[0] if i < 2 else rng.choice(alphabet)
        rules.append(Rule(rng.choice(states), action, letter, rng.choice(states)))
    return Protocol(states, alphabet, init, fin, tuple(rules))


def gen_random_acyclic_net(
    seed: int, max_places: int = 6, max_transitions: int = 6, max_weight: int = 2, reachable_final: bool | None = None
) -> PetriNetSystem:
    """Transitions only move tokens to higher-numbered places, so the net has no cycle.

    With ``reachable_final`` the final marking is initial + A v for a small
    random v >= 0 (a marking-equation solution exists), otherwise random.
    """
    rng = random.Random(seed)
    np_ = rng.randint(2, max_places)
    places = tuple(f"p{i}" for i in range(np_))
    transitions = tuple(f"t{j}" for j in range(rng.randint(1, max_transitions)))
    pre, post = {}, {}
    for t in transitions:
        cut = rng.randint(1, np_ - 1)
        ins = rng.sample(places[:cut], rng.randint(1, min(2, cut)))
        outs = rng.sample(places[cut:], rng.randint(1, min(2, np_ - cut)))
        pre[t] = {p: rng.randint(1, max_weight) for p in ins}
        post[t] = {p: rng.randint(1, max_weight) for p in outs}
    net = PetriNet(places, transitions, pre, post)
    initial = Marking({p: rng.randint(0, 2) for p in places[: max(1, np_ // 2)]})
    if reachable_final is None:
        reachable_final = rng.random() < 0.5
    if reachable_final:
        v = {t: rng.randint(0, 1) for t in transitions}
        final = net.apply(initial, v)
        if all(c >= 0 for c in final.values()):
            return PetriNetSystem(net, initial, Marking(dict(final)))
    final = Marking({p: rng.randint(0, 2) for p in places[np_ // 2:]})
    return PetriNetSystem(net, initial, final)


def random_rle_run(rng: random.Random, net: PetriNet, max_blocks: int = 4, max_len: int = 3, max_count: int = 64) -> RleRun:
    blocks = []
    for _ in range(rng.randint(1, max_blocks)):
        seq = tuple(rng.choice(net.transitions) for _ in range(rng.randint(1, max_len)))
        blocks.append((seq, rng.randint(1, max_count)))
    return RleRun(tuple(blocks))


# ----------------------------------------------------------------- catalog

FIG1_NET = """\
[petrinet]
places: i pl pm pr f
transitions: t1 t2 t3 t4
pre: t1 i 2
post: t1 f 2
pre: t2 i 1
pre: t2 pl 1
post: t2 pr 1
post: t2 f 1
pre: t3 i 2
post: t3 pl 1
post: t3 pm 1
pre: t4 pm 1
pre: t4 pr 1
post: t4 f 2
initial: i 1
final: f 1
"""

SINGLE_RULE = """\
[symmetric-protocol]
states: init fin
alphabet: a
init: init
fin: fin
rules:
init a fin
"""

P2 = """\
[symmetric-protocol]
states: init fin
alphabet: a b
init: init
fin: fin
rules:
init a fin
init b fin
fin b fin
"""

SAT_FORMULA = CnfFormula(1, ((1, 1, 1),))
UNSAT_FORMULA = CnfFormula(1, ((1, 1, 1), (-1, -1, -1)))


def fig1() -> PetriNetSystem:
    return parse_net(FIG1_NET)


def single_rule() -> SymmetricProtocol:
    return SymmetricProtocol.from_triples(("init", "fin"), ("a",), "init", "fin", [("init", "a", "fin")])


def p2() -> SymmetricProtocol:
    return SymmetricProtocol.from_triples(
        ("init", "fin"), ("a", "b"), "init", "fin",
        [("init", "a", "fin"), ("init", "b", "fin"), ("fin", "b", "fin")],
    )


def trivial_leader(follower: SymmetricProtocol) -> LeaderProtocolPair:
    """One-state leader without rules next to ``follower``."""
    leader = SymmetricProtocol(("lead",), follower.alphabet, "lead", "lead", ())
    return LeaderProtocolPair(leader, follower)


CATALOG = {
    "fig1": FIG1_NET,
    "single_rule": SINGLE_RULE,
    "p2": P2,
    "sat": SAT_FORMULA,
    "unsat": UNSAT_FORMULA,
}
