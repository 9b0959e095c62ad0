import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rvcutoff import generators as gen
from rvcutoff.model import PetriNet, protocol_to_net
from rvcutoff.oracle import (
    BUDGET_EXCEEDED,
    NO_EXHAUSTIVE,
    YES,
    DisabledAt,
    ValidationError,
    bfs_reach,
    fire_sequence,
    reachable_set_size,
    semi_decide_cutoff,
    validate_by_expansion,
    validate_rle_run,
)
from rvcutoff.runs import RleRun
from rvcutoff.vectors import Marking


def test_bfs_examples(fig1):
    net = fig1.net
    r = bfs_reach(net, {"i": 2}, {"f": 2})
    assert r.status == YES and r.run == ("t1",)
    assert bfs_reach(net, {"i": 1}, {"f": 1}).status == NO_EXHAUSTIVE
    r = bfs_reach(net, {"i": 3}, {"f": 3})
    assert r.run == ("t3", "t2", "t4") and r.reached == Marking({"f": 3})


def test_bfs_cover_and_argument_checks(fig1):
    r = bfs_reach(fig1.net, {"i": 3}, cover="pr")
    assert r.found and r.reached["pr"] > 0
    with pytest.raises(ValueError):
        bfs_reach(fig1.net, {"i": 3}, node_budget=0, cover="pr")
    with pytest.raises(ValueError):
        bfs_reach(fig1.net, {"i": 3})


def test_bfs_budget_on_unbounded_net():
    grow = PetriNet(("p",), ("t",), {"t": {"p": 1}}, {"t": {"p": 2}})
    r = bfs_reach(grow, {"p": 1}, {"p": 0}, node_budget=50)
    assert r.status == BUDGET_EXCEEDED and r.explored == 50


def test_sweeps(fig1, single_rule_net, p2):
    s = semi_decide_cutoff(fig1, 10)
    assert (s.even, s.odd) == (2, 3)
    assert [n for n in range(1, 11) if s.reaches(n)] == list(range(2, 11))
    assert s.minimal_cutoff == 2 and s.pair() == 2 and s.exhaustive
    s = semi_decide_cutoff(single_rule_net, 9)
    assert (s.even, s.odd) == (2, None) and s.minimal_cutoff is None
    s = semi_decide_cutoff(protocol_to_net(p2), 10)
    assert (s.even, s.odd) == (2, 3)


def test_sweep_without_failures_means_cutoff_zero(fig1):
    from rvcutoff.model import PetriNetSystem

    same = PetriNetSystem(fig1.net, fig1.initial, fig1.initial)
    assert semi_decide_cutoff(same, 3).minimal_cutoff == 0
    assert semi_decide_cutoff(fig1, 10, n_min=4).minimal_cutoff == 4


def test_sweep_runs_replay(fig1):
    s = semi_decide_cutoff(fig1, 6)
    for n, run in s.runs.items():
        m0, m1 = fig1.scaled(n)
        assert fire_sequence(fig1.net, m0, run) == m1


def test_rle_examples(fig1):
    net = fig1.net
    assert validate_rle_run(net, {"i": 4}, RleRun(((("t1",), 2),))) == Marking({"f": 4})
    with pytest.raises(DisabledAt) as err:
        validate_rle_run(net, {"i": 1}, RleRun(((("t4",), 1),)))
    assert err.value.where == (0, 1, 0, "t4")


def test_rle_dimension_mismatch(fig1):
    with pytest.raises(ValidationError):
        validate_rle_run(fig1.net, {"zz": 1}, RleRun(((("t1",), 1),)))
    with pytest.raises(ValidationError):
        validate_rle_run(fig1.net, {"i": 2}, RleRun(((("nope",), 1),)))


def test_endpoint_rule_on_a_million_steps():
    net = PetriNet(("p", "q"), ("t",), {"t": {"p": 1}}, {"t": {"q": 1}})
    n = 10**6
    run = RleRun(((("t",), n),))
    assert validate_rle_run(net, {"p": n}, run) == Marking({"q": n})
    with pytest.raises(DisabledAt) as err:
        validate_rle_run(net, {"p": n - 1}, run)
    assert err.value.where == (0, n, 0, "t")


def test_endpoint_failure_location_matches_expansion(fig1):
    run = RleRun(((("t3", "t2", "t4"), 5),))
    with pytest.raises(DisabledAt) as fast:
        validate_rle_run(fig1.net, {"i": 11}, run, expand_limit=1)
    with pytest.raises(DisabledAt) as slow:
        validate_by_expansion(fig1.net, {"i": 11}, run)
    assert fast.value.where == slow.value.where


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_endpoint_rule_differential(seed):
    rng = random.Random(seed)
    net = gen.gen_random_acyclic_net(seed).net
    run = gen.random_rle_run(rng, net)
    start = {p: rng.randint(0, 6) for p in net.places}

    def verdict(check):
        try:
            return check()
        except DisabledAt as e:
            return e.where

    assert verdict(lambda: validate_rle_run(net, start, run, expand_limit=1)) == verdict(
        lambda: validate_by_expansion(net, start, run)
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4))
def test_canonicalization_and_conservation(seed, n):
    system = protocol_to_net(gen.gen_random_protocol(4, 2, 6, False, seed))
    net = system.net
    order = list(net.transitions)
    random.Random(seed).shuffle(order)
    start = system.initial * n
    assert reachable_set_size(net, start) == reachable_set_size(net, start, order=order)
    r = bfs_reach(net, start, system.final * n)
    if r.found:
        assert sum(r.reached.values()) == n
        assert validate_rle_run(net, start, RleRun.of(r.run)) == system.final * n
