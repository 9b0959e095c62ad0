"""Command-line frontend: analyze, oracle, gen, validate-run, corpus."""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import generators as gen
from .cutoff import (
    DEFAULT_STEP_BUDGET,
    NotAcyclic,
    TooLarge,
    build_scaling_witness,
    check_witness,
    decide_bounded_loss,
    decide_cutoff,
    decide_cutoff_acyclic,
    scaling_params,
)
from .exact import DEFAULT_NODE_BUDGET
from .io import ParseError, digest, parse_any, parse_run, serialize_protocol, serialize_run
from .model import LeaderProtocolPair, ModelError, PetriNetSystem, Protocol, SymmetricProtocol, protocol_to_net
from .oracle import BUDGET_EXCEEDED, DEFAULT_N_MAX, ValidationError, bfs_reach, semi_decide_cutoff, validate_rle_run
from .vectors import SolutionVector
from .symmetric import (
    INCONCLUSIVE,
    GuardViolation,
    NotSymmetric,
    decide_leader_cutoff,
    decide_symmetric_bounded_loss,
    decide_symmetric_cutoff,
    verify_f2_certificate,
    verify_leader_certificate,
)

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4
MODES = ("cutoff", "cutoff-acyclic", "bounded-loss", "symmetric", "symmetric-bounded-loss", "symmetric-leader")


class InvariantViolation(RuntimeError):
    pass


def rational(x) -> str:
    """Exact rational as "p/q" (integers as plain decimal strings)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _vector(v) -> dict[str, str] | None:
    return None if v is None else {k: rational(c) for k, c in sorted(v.items())}


def _as_system(obj) -> PetriNetSystem:
    if isinstance(obj, PetriNetSystem):
        return obj
    if isinstance(obj, Protocol):
        return protocol_to_net(obj)
    raise ModelError("this mode needs a Petri net or a protocol")


def _expect(obj, kind, what: str):
    if not isinstance(obj, kind):
        raise ModelError(f"this mode needs {what}")
    return obj


# ---------------------------------------------------------------- analyze


def _net_certificates(system: PetriNetSystem, d, args) -> dict:
    certs = {
        "support": sorted(d.support or ()),
        "rational_solution": _vector(d.rational_solution),
        "integer_solution": _vector(d.integer_solution),
    }
    cont = d.certificates.get("continuous")
    if d.yes:
        if cont is not None and not cont.verify_reach(system):
            raise InvariantViolation("continuous certificate failed re-verification")
        if d.integer_solution is not None and system.net.apply(system.initial, d.integer_solution) != SolutionVector(system.final):
            raise InvariantViolation("integer solution violates the marking equation")
        if args.bound:
            certs["bound"] = str(d.bound)
        if args.witness and cont is not None:
            certs["witness"] = _scaling_witness(system, cont, args.step_budget)
    return certs


def _scaling_witness(system: PetriNetSystem, cont, budget: int) -> dict:
    params = scaling_params(system.net, cont.solution)
    built = build_scaling_witness(system, cont, budget, params)
    if isinstance(built, TooLarge):
        return {"status": "too-large", "length": str(built.length), "budget": str(budget)}
    n = params.scale_N
    if not check_witness(system.net, system.initial * n, built, system.final * n):
        raise InvariantViolation("scaling witness failed validation")
    return {"status": "validated", "scale": str(n), "length": str(built.expanded_length), "run": serialize_run(built)}


def analyze(obj, mode: str, args) -> tuple[dict, int]:
    certs: dict = {}
    parity = None
    code = EXIT_OK
    if mode in ("cutoff", "cutoff-acyclic"):
        system = _as_system(obj)
        d = (decide_cutoff if mode == "cutoff" else decide_cutoff_acyclic)(system)
        certs = _net_certificates(system, d, args)
    elif mode == "bounded-loss":
        d = decide_bounded_loss(_expect(obj, Protocol, "a protocol"))
        certs = {"support": sorted(d.support or ()), "rational_solution": _vector(d.rational_solution)}
        cover = d.certificates.get("cover")
        system = protocol_to_net(obj)
        if d.yes and cover is not None and not cover.verify_cover(system.net, system.initial, obj.fin):
            raise InvariantViolation("coverability certificate failed re-verification")
    elif mode == "symmetric":
        p = _expect(obj, SymmetricProtocol, "a symmetric protocol")
        d = decide_symmetric_cutoff(p)
        certs = {"path": d.certificates.get("path")}
        if "f2" in d.certificates:
            if not verify_f2_certificate(p, d.certificates["f2"]):
                raise InvariantViolation("GF(2) solution failed re-verification")
            certs["f2_solution"] = {t: b for t, b in sorted(d.certificates["f2"].items())}
    elif mode == "symmetric-bounded-loss":
        d = decide_symmetric_bounded_loss(_expect(obj, SymmetricProtocol, "a symmetric protocol"))
        certs = {"path": d.certificates.get("path")}
        if d.yes:
            certs["bound"] = str(d.bound)
    elif mode == "symmetric-leader":
        pair = _expect(obj, LeaderProtocolPair, "a leader protocol")
        d = decide_leader_cutoff(pair, ilp_budget=args.ilp_budget, support_scope=args.support_scope)
        parity = {}
        for par, c in d.certificates.get("leader", {}).items():
            name = "even" if par == 0 else "odd"
            if c["status"] == "yes" and not verify_leader_certificate(pair, par, c):
                raise InvariantViolation(f"{name} leader certificate failed re-verification")
            certs[name] = {
                "status": c["status"],
                "edges": [list(e) for e in c["edges"]],
                "v": _vector(c["v"]),
                "n": None if c["n"] is None else str(c["n"]),
            }
            parity[name] = c["n"]
        if d.answer == INCONCLUSIVE:
            code = EXIT_BUDGET
    else:
        raise ValueError(f"unknown mode {mode}")
    report = {"answer": d.answer, "certificates": certs, "parity_witnesses": parity, "notes": d.notes}
    return report, code


def _cross_check(obj, args) -> dict | None:
    if not args.cross_check:
        return None
    if isinstance(obj, LeaderProtocolPair):
        return None
    sweep = semi_decide_cutoff(_as_system(obj), args.n_max, args.budget)
    return {
        "even": sweep.even,
        "odd": sweep.odd,
        "pair": sweep.pair(),
        "n_max": args.n_max,
        "exhaustive": sweep.exhaustive,
    }


def cmd_analyze(args) -> int:
    text = Path(args.input).read_text()
    started = time.perf_counter()
    obj = parse_any(text)
    body, code = analyze(obj, args.mode, args)
    oracle = _cross_check(obj, args)
    if oracle is not None and body["parity_witnesses"] is None:
        body["parity_witnesses"] = {"even": oracle["even"], "odd": oracle["odd"]}
    report = {
        "problem": args.mode,
        "input_digest": digest(text),
        "answer": body["answer"],
        "certificates": body["certificates"],
        "parity_witnesses": body["parity_witnesses"],
        "oracle": oracle,
        "timing_ms": round((time.perf_counter() - started) * 1000, 3),
    }
    _emit(report, args.json, body["notes"])
    return code


def _emit(report: dict, as_json: bool, notes=()) -> None:
    if as_json:
        print(json.dumps(report, sort_keys=False))
        return
    for key, value in report.items():
        if isinstance(value, dict):
            print(f"{key}:")
            for k, v in value.items():
                if isinstance(v, dict) and "run" in v:
                    v = {**v, "run": f"<{v['run'].count(chr(10)) - 1} blocks, use --json>"}
                print(f"  {k}: {v}")
        else:
            print(f"{key}: {value}")
    for note in notes:
        print(f"note: {note}")


# ----------------------------------------------------------------- oracle


def cmd_oracle(args) -> int:
    text = Path(args.input).read_text()
    started = time.perf_counter()
    obj = parse_any(text)
    if isinstance(obj, LeaderProtocolPair):
        from .model import leader_to_net

        system, ann = leader_to_net(obj)
        status = {}
        for n in range(1, args.n_max + 1):
            status[n] = bfs_reach(system.net, ann.configuration(n), ann.configuration(n, True), node_budget=args.budget).status
        even = next((n for n, s in status.items() if n % 2 == 0 and s == "yes"), None)
        odd = next((n for n, s in status.items() if n % 2 == 1 and s == "yes"), None)
    else:
        sweep = semi_decide_cutoff(_as_system(obj), args.n_max, args.budget)
        status, even, odd = sweep.status, sweep.even, sweep.odd
    report = {
        "problem": "oracle",
        "input_digest": digest(text),
        "even": even,
        "odd": odd,
        "status": {str(n): s for n, s in status.items()},
        "timing_ms": round((time.perf_counter() - started) * 1000, 3),
    }
    _emit(report, args.json)
    return EXIT_BUDGET if BUDGET_EXCEEDED in status.values() else EXIT_OK


# -------------------------------------------------------------------- gen


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    if args.kind == "cvp":
        c = gen.parse_circuit(Path(args.circuit).read_text()) if args.circuit else gen.random_circuit(rng, max_gates=args.gates)
        _write(serialize_protocol(gen.gen_cvp_protocol(c)), args.out)
        print(f"circuit value: {gen.eval_circuit(c)}", file=sys.stderr)
    elif args.kind == "3sat":
        f = gen.parse_dimacs(Path(args.cnf).read_text()) if args.cnf else gen.random_formula(rng)
        _write(serialize_protocol(gen.gen_3sat_leader_protocol(f)), args.out)
        print(f"formula: {gen.sat_brute_force(f)}", file=sys.stderr)
    else:
        p = gen.gen_random_protocol(args.states, args.letters, args.rules, args.symmetric, args.seed)
        _write(serialize_protocol(p), args.out)
    return EXIT_OK


# ---------------------------------------------------------- validate-run


def cmd_validate_run(args) -> int:
    obj = parse_any(Path(args.input).read_text())
    system = _as_system(obj)
    start, run = parse_run(Path(args.run).read_text())
    start = system.initial if start is None else start
    try:
        end = validate_rle_run(system.net, start, run)
    except ValidationError as exc:
        report = {"valid": False, "error": str(exc)}
        if hasattr(exc, "where"):
            report["disabled_at"] = list(exc.where)
        _emit(report, args.json)
        return EXIT_PARSE
    report = {
        "valid": True,
        "length": str(run.expanded_length),
        "final": {p: str(n) for p, n in end.items()},
    }
    _emit(report, args.json)
    return EXIT_OK


# ------------------------------------------------------------------ corpus


def corpus_instance(seed: int, n_max: int = DEFAULT_N_MAX, budget: int = DEFAULT_NODE_BUDGET) -> dict:
    """One agreement check: decider versus oracle on a random protocol, plus the symmetric specialization."""
    p = gen.gen_random_protocol(4, 2, 6, False, seed)
    system = protocol_to_net(p)
    d = decide_cutoff(system)
    sweep = semi_decide_cutoff(system, n_max, budget)
    pair = sweep.pair()
    contradiction = pair is not None and not d.yes
    sp = gen.gen_random_protocol(4, 2, 6, True, seed)
    agree = decide_symmetric_cutoff(sp).answer == decide_cutoff(protocol_to_net(sp)).answer
    return {"seed": seed, "answer": d.answer, "oracle_pair": pair, "contradiction": contradiction, "symmetric_agree": agree}


def cmd_corpus(args) -> int:
    seeds = [args.seed + i for i in range(args.count)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(corpus_instance, seeds))
    else:
        results = [corpus_instance(s) for s in seeds]
    bad = [r for r in results if r["contradiction"] or not r["symmetric_agree"]]
    report = {
        "instances": len(results),
        "yes": sum(r["answer"] == "yes" for r in results),
        "contradictions": sum(r["contradiction"] for r in results),
        "symmetric_disagreements": sum(not r["symmetric_agree"] for r in results),
        "failing_seeds": [r["seed"] for r in bad],
    }
    _emit(report, args.json)
    return EXIT_INVARIANT if bad else EXIT_OK


# ------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rvcutoff", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="decide a cut-off problem")
    a.add_argument("--mode", choices=MODES, required=True)
    a.add_argument("--input", required=True)
    a.add_argument("--json", action="store_true")
    a.add_argument("--witness", action="store_true", help="build and validate a scaling witness run")
    a.add_argument("--bound", action="store_true", help="report the explicit cut-off bound")
    a.add_argument("--ilp-budget", type=int, default=DEFAULT_NODE_BUDGET)
    a.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET)
    a.add_argument("--support-scope", choices=("leader", "all"), default="leader")
    a.add_argument("--cross-check", action="store_true", help="also run the explicit-state sweep")
    a.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    a.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("oracle", help="explicit-state sweep over n = 1..n-max")
    o.add_argument("--input", required=True)
    o.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    o.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="generate instances")
    g.add_argument("kind", choices=("cvp", "3sat", "random"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--circuit", help="circuit file (cvp)")
    g.add_argument("--gates", type=int, default=8)
    g.add_argument("--cnf", help="DIMACS file (3sat)")
    g.add_argument("--states", type=int, default=4)
    g.add_argument("--letters", type=int, default=2)
    g.add_argument("--rules", type=int, default=6)
    g.add_argument("--symmetric", action="store_true")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate-run", help="replay a run file")
    v.add_argument("--input", required=True)
    v.add_argument("--run", required=True)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_validate_run)

    c = sub.add_parser("corpus", help="random agreement suite")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--count", type=int, default=20)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ModelError, NotAcyclic, NotSymmetric, GuardViolation, gen.GuardViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
