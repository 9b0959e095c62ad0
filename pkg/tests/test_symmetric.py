import pytest

from rvcutoff import generators as gen
from rvcutoff.cutoff import NO, YES, PreconditionError, decide_cutoff
from rvcutoff.model import LeaderProtocolPair, SymmetricProtocol, leader_to_net, protocol_to_net
from rvcutoff.oracle import bfs_reach, semi_decide_cutoff, validate_rle_run
from rvcutoff.symmetric import (
    GuardViolation,
    LeaderInstance,
    NotSymmetric,
    build_leader_witness,
    decide_leader_cutoff,
    decide_symmetric_bounded_loss,
    decide_symmetric_cutoff,
    good_states,
    is_compatible,
    realize_compatible_run,
    verify_f2_certificate,
    verify_leader_certificate,
)
from rvcutoff.vectors import Marking

NO_RULES = SymmetricProtocol.from_triples(("init", "fin"), ("a",), "init", "fin", ())


def test_leaderless_examples(single_rule, p2):
    d = decide_symmetric_cutoff(single_rule)
    assert d.answer == NO and d.certificates["path"] == ["init", "fin"]
    d = decide_symmetric_cutoff(p2)
    assert d.answer == YES and verify_f2_certificate(p2, d.certificates["f2"])
    assert decide_symmetric_cutoff(NO_RULES).answer == NO


def test_f2_certificate_rejects_wrong_bits(p2):
    assert not verify_f2_certificate(p2, {})


def test_bounded_loss_examples(single_rule, p2):
    d = decide_symmetric_bounded_loss(single_rule)
    assert d.answer == YES and d.bound == 1
    assert decide_symmetric_bounded_loss(p2).answer == YES
    assert decide_symmetric_bounded_loss(NO_RULES).answer == NO


def test_requires_symmetry():
    with pytest.raises(NotSymmetric):
        decide_symmetric_cutoff(gen.gen_cvp_protocol(gen.Circuit((("x1", 1),), (gen.Gate("g1", gen.NOT, ("x1",)),), "g1")))


def test_agrees_with_general_decider_on_p2(p2, single_rule):
    for p in (p2, single_rule):
        assert decide_symmetric_cutoff(p).answer == decide_cutoff(protocol_to_net(p)).answer


@pytest.mark.parametrize("seed", range(12))
def test_good_state_soundness(seed):
    p = gen.gen_random_protocol(4, 2, 6, True, seed)
    net = protocol_to_net(p).net
    for q in good_states(p):
        there = bfs_reach(net, {p.init: 2}, {q: 2})
        back = bfs_reach(net, {q: 2}, {p.fin: 2})
        assert there.found and back.found


def test_trivial_leader_examples(single_rule, p2):
    assert decide_leader_cutoff(gen.trivial_leader(single_rule)).answer == NO
    d = decide_leader_cutoff(gen.trivial_leader(p2))
    assert d.answer == YES
    for par in (0, 1):
        assert verify_leader_certificate(gen.trivial_leader(p2), par, d.certificates["leader"][par])


def test_support_scope_toggle(p2):
    pair = gen.trivial_leader(p2)
    assert decide_leader_cutoff(pair, support_scope="all").answer == NO
    with pytest.raises(ValueError):
        decide_leader_cutoff(pair, support_scope="some")


def test_edge_guard(p2):
    with pytest.raises(GuardViolation):
        decide_leader_cutoff(gen.gen_3sat_leader_protocol(gen.SAT_FORMULA), max_edges=1)


def test_3sat_examples():
    sat = gen.gen_3sat_leader_protocol(gen.SAT_FORMULA)
    unsat = gen.gen_3sat_leader_protocol(gen.UNSAT_FORMULA)
    d = decide_leader_cutoff(sat)
    assert d.answer == YES
    assert decide_leader_cutoff(unsat).answer == NO
    for par in (0, 1):
        cert = d.certificates["leader"][par]
        assert verify_leader_certificate(sat, par, cert)
        k, run = build_leader_witness(sat, cert["v"], cert["n"])
        _, ann = leader_to_net(sat)
        net = LeaderInstance.build(sat).system.net
        assert validate_rle_run(net, ann.configuration(k), run) == ann.configuration(k, final=True)


def test_3sat_oracle_at_five_followers():
    pair = gen.gen_3sat_leader_protocol(gen.SAT_FORMULA)
    system, ann = leader_to_net(pair)
    assert bfs_reach(system.net, ann.configuration(5), ann.configuration(5, final=True)).found


def test_realize_zero_and_single_step(single_rule):
    pair = gen.trivial_leader(single_rule)
    system, ann = leader_to_net(pair)
    net = system.net
    config = Marking({"lead": 1, "init": 4, "fin": 2})
    assert realize_compatible_run(net, ann, config, {}) == []
    (t,) = [t for t in net.transitions if not ann.is_leader(t)]
    assert realize_compatible_run(net, ann, config, {t: 1}) == [t]
    with pytest.raises(PreconditionError):
        realize_compatible_run(net, ann, ann.configuration(1), {t: 1})


def test_compatibility_needs_single_leader(single_rule):
    system, ann = leader_to_net(gen.trivial_leader(single_rule))
    assert not is_compatible(system.net, ann, Marking({"init": 2}), {})


def test_leader_parity_matches_sweep(p2, single_rule):
    for follower in (p2, single_rule):
        pair = gen.trivial_leader(follower)
        system, ann = leader_to_net(pair)
        found = {n % 2 for n in range(0, 8)
                 if bfs_reach(system.net, ann.configuration(n), ann.configuration(n, final=True)).found}
        assert (decide_leader_cutoff(pair).answer == YES) == (found == {0, 1})


def test_pair_type():
    assert isinstance(gen.trivial_leader(gen.p2()), LeaderProtocolPair)
    sweep = semi_decide_cutoff(protocol_to_net(gen.p2()), 4)
    assert sweep.pair() == 2
