from fractions import Fraction

import pytest

from rvcutoff import generators as gen
from rvcutoff.continuous import ContinuousCertificate, continuous_reachable
from rvcutoff.cutoff import (
    NO,
    YES,
    NotAcyclic,
    PreconditionError,
    TooLarge,
    build_insertion_witness,
    build_scaling_witness,
    check_witness,
    compute_cutoff_bound,
    decide_bounded_loss,
    decide_cutoff,
    decide_cutoff_acyclic,
    insertion_factor,
    scaling_params,
)
from rvcutoff.model import PetriNet, PetriNetSystem, Protocol, protocol_to_net
from rvcutoff.oracle import semi_decide_cutoff, validate_rle_run
from rvcutoff.runs import RleRun
from rvcutoff.vectors import Marking, SolutionVector

FIFTH = SolutionVector({t: Fraction(1, 5) for t in ("t1", "t2", "t3", "t4")})
MIXED_Y = SolutionVector({"t1": -1, "t2": 1, "t3": 1, "t4": 1})


def _coherent(system, d):
    net = system.net
    target = SolutionVector(system.final)
    assert net.apply(system.initial, d.rational_solution) == target
    assert net.apply(system.initial, d.integer_solution) == target
    assert d.rational_solution.is_nonnegative()
    assert d.integer_solution.support <= d.rational_solution.support


def test_fig1_yes_both_deciders(fig1):
    for decide in (decide_cutoff, decide_cutoff_acyclic):
        d = decide(fig1)
        assert d.answer == YES
        _coherent(fig1, d)
        assert d.rational_solution.support == {"t1", "t2", "t3", "t4"}


def test_mixed_sign_integer_solution_is_valid(fig1):
    assert fig1.net.apply(fig1.initial, MIXED_Y) == SolutionVector(fig1.final)


def test_single_rule_is_no(single_rule_net):
    for decide in (decide_cutoff, decide_cutoff_acyclic):
        d = decide(single_rule_net)
        assert d.answer == NO
        assert d.rational_solution is not None  # rational 1/2 exists


def test_no_transitions_is_no():
    net = PetriNet(("p", "q"), ())
    system = PetriNetSystem(net, Marking({"p": 1}), Marking({"q": 1}))
    assert decide_cutoff_acyclic(system).answer == NO
    assert decide_cutoff(system).answer == NO


def test_cyclic_net_rejected_by_acyclic_decider():
    net = PetriNet(("p",), ("t",), {"t": {"p": 1}}, {"t": {"p": 1}})
    with pytest.raises(NotAcyclic):
        decide_cutoff_acyclic(PetriNetSystem(net, Marking({"p": 1}), Marking({"p": 1})))


def test_p2_is_yes(p2):
    d = decide_cutoff(protocol_to_net(p2))
    assert d.answer == YES


def test_equal_markings_give_bound_zero(fig1):
    same = PetriNetSystem(fig1.net, fig1.initial, fig1.initial)
    d = decide_cutoff(same)
    assert d.answer == YES and d.bound == 0


def test_bounded_loss_examples(single_rule):
    assert decide_bounded_loss(single_rule).answer == YES
    empty = Protocol(("init", "fin"), ("a",), "init", "fin", ())
    assert decide_bounded_loss(empty).answer == NO
    with pytest.raises(TypeError):
        decide_bounded_loss(gen.fig1())


def test_bounded_loss_on_cvp():
    one = gen.Circuit((("x1", 1), ("x2", 1)), (gen.Gate("g1", gen.AND, ("x1", "x2")),), "g1")
    zero = gen.Circuit((("x1", 1), ("x2", 0)), (gen.Gate("g1", gen.AND, ("x1", "x2")),), "g1")
    assert decide_bounded_loss(gen.gen_cvp_protocol(one)).answer == YES
    assert decide_bounded_loss(gen.gen_cvp_protocol(zero)).answer == NO
    assert decide_cutoff(protocol_to_net(gen.gen_cvp_protocol(zero))).answer == NO


def test_fig1_scaling_params_at_one_fifth(fig1):
    params = scaling_params(fig1.net, FIFTH)
    assert (params.w, params.m, params.k, params.ell) == (2, 4, 5, Fraction(4, 5))
    assert (params.beta, params.gamma, params.scale_N) == (81, 2592, 4_199_040)
    assert params.scale_N == 16 * 2 * 3**8 * 5 * 4
    assert params.length == 3_359_232


def test_fig1_bound_dominates_oracle_minimum(fig1):
    d = decide_cutoff(fig1)
    sweep = semi_decide_cutoff(fig1, 10)
    assert sweep.minimal_cutoff == 2
    assert d.bound >= 2
    cert = ContinuousCertificate(FIFTH.support, FIFTH, True, True)
    bound = compute_cutoff_bound(fig1, cert, MIXED_Y)
    n_p = len(fig1.net.preset(FIFTH.support))
    assert n_p == 4
    mu = 4 * (3_359_232 * n_p * 2 + n_p * 2 + 1)
    assert bound == (mu * 4_199_040) ** 2


def test_bound_rejects_outside_support(fig1):
    cert = ContinuousCertificate(frozenset({"t1"}), SolutionVector({"t1": 1}), True, True)
    with pytest.raises(PreconditionError):
        compute_cutoff_bound(fig1, cert, MIXED_Y)


def test_fig1_scaling_witness_too_large(fig1):
    d = decide_cutoff(fig1)
    cert = d.certificates["continuous"]
    built = build_scaling_witness(fig1, cert, 10**7)
    assert isinstance(built, TooLarge) and built.length > 10**7


def test_fig1_scaling_witness_at_one_fifth(fig1):
    cert = ContinuousCertificate(FIFTH.support, FIFTH, True, True)
    run = build_scaling_witness(fig1, cert, 10**7)
    assert run.expanded_length == 3_359_232
    n = 4_199_040
    assert check_witness(fig1.net, fig1.initial * n, run, fig1.final * n)


def test_single_transition_scaling_witness():
    net = PetriNet(("p", "q"), ("t",), {"t": {"p": 1}}, {"t": {"q": 1}})
    system = PetriNetSystem(net, Marking({"p": 1}), Marking({"q": 1}))
    cert = continuous_reachable(system)
    params = scaling_params(net, cert.solution)
    run = build_scaling_witness(system, cert, 10**6)
    n = params.scale_N
    assert validate_rle_run(net, system.initial * n, run) == system.final * n


def test_empty_support_gives_empty_run(fig1):
    same = PetriNetSystem(fig1.net, fig1.initial, fig1.initial)
    cert = continuous_reachable(same)
    assert build_scaling_witness(same, cert) == RleRun()


def test_fig1_insertion_witness(fig1):
    base = RleRun.of(["t3", "t2", "t4", "t1"])
    mu, run = build_insertion_witness(fig1.net, {"i": 5}, base, MIXED_Y, {"i": 1}, {"f": 1})
    assert mu == insertion_factor(fig1.net, base.parikh(), MIXED_Y) == 164
    assert validate_rle_run(fig1.net, Marking({"i": 5 * mu + 1}), run) == Marking({"f": 5 * mu + 1})


def test_insertion_with_zero_y_is_empty(fig1):
    base = RleRun.of(["t3", "t2", "t4", "t1"])
    assert build_insertion_witness(fig1.net, {"i": 5}, base, {}, {}, {}) == (0, RleRun())


def test_insertion_preconditions(fig1):
    base = RleRun.of(["t1"])
    with pytest.raises(PreconditionError):
        build_insertion_witness(fig1.net, {"i": 2}, base, MIXED_Y, {"i": 1}, {"f": 1})
    with pytest.raises(PreconditionError):
        build_insertion_witness(fig1.net, {"i": 5}, RleRun.of(["t3", "t2", "t4", "t1"]), MIXED_Y, {"i": 1}, {"i": 1})


def test_scaled_then_inserted_witness_composes(fig1):
    # scaling witness at 1/5 from N*i to N*f, then insertion of y: mu*N*i + i -> mu*N*f + f
    cert = ContinuousCertificate(FIFTH.support, FIFTH, True, True)
    scaled = build_scaling_witness(fig1, cert, 10**7)
    n = 4_199_040
    mu, run = build_insertion_witness(fig1.net, {"i": n}, scaled, MIXED_Y, {"i": 1}, {"f": 1}, 10**7)
    total = mu * n + 1
    assert validate_rle_run(fig1.net, Marking({"i": total}), run) == Marking({"f": total})
