import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rvcutoff.exact import (
    BUDGET_EXCEEDED,
    FEASIBLE,
    FIXED_ZERO,
    INFEASIBLE,
    INTEGER,
    INTEGER_NN,
    RATIONAL_NN,
    UNBOUNDED,
    ExactSimplex,
    F2System,
    LinearSystem,
    f2_solve,
    hermite_columns,
    ilp_feasible,
    integer_solve,
    lp_solve,
)
from rvcutoff.continuous import marking_equation


def test_fig1_marking_equation_is_rational_feasible(fig1):
    system = marking_equation(fig1.net, fig1.delta)
    result = lp_solve(system)
    assert result.status == FEASIBLE
    assert system.satisfied_by(result.solution)
    fifth = {t: Fraction(1, 5) for t in fig1.net.transitions}
    assert system.satisfied_by(fifth)


def test_negative_rhs_gives_verifying_farkas_certificate():
    system = LinearSystem(((1,),), (-1,), (RATIONAL_NN,))
    result = lp_solve(system)
    assert result.status == INFEASIBLE
    assert result.certificate.verify(system)


def test_unbounded_objective():
    system = LinearSystem(((1, -1),), (0,), (RATIONAL_NN, RATIONAL_NN))
    result = lp_solve(system, 0)
    assert result.status == UNBOUNDED
    assert system.satisfied_by(result.solution)


def test_maximum_is_exact():
    # x + y = 3/2 scaled: 2x + 2y = 3, maximize x
    system = LinearSystem(((2, 2),), (3,), (RATIONAL_NN, RATIONAL_NN), ("x", "y"))
    result = lp_solve(system, "x")
    assert result.status == FEASIBLE and result.value == Fraction(3, 2)


def test_fixed_zero_column_is_ignored():
    system = LinearSystem(((1, 1),), (1,), (FIXED_ZERO, RATIONAL_NN), ("a", "b"))
    result = lp_solve(system, "a")
    assert result.solution["b"] == 1 and result.solution["a"] == 0


def test_simplex_rejects_integer_tags():
    with pytest.raises(ValueError):
        ExactSimplex(LinearSystem(((1,),), (1,), (INTEGER,)))


def test_integer_examples(fig1):
    assert not integer_solve(LinearSystem(((2,),), (-1,), (INTEGER,))).feasible
    r = integer_solve(LinearSystem(((1, 1),), (3,), (INTEGER, INTEGER)))
    assert r.feasible and sum(r.solution.values()) == 3
    system = marking_equation(fig1.net, fig1.delta).with_tags(INTEGER)
    r = integer_solve(system)
    assert r.feasible and system.satisfied_by(r.solution)
    assert system.satisfied_by({"t1": -1, "t2": 1, "t3": 1, "t4": 1})


def test_hermite_columns_reconstructs():
    a = [[2, 4, 4], [-6, 6, 12]]
    hcols, ucols, pivots = hermite_columns(a)
    # columns in, columns out: A U = H
    for u, h in zip(ucols, hcols):
        assert [sum(a[i][k] * u[k] for k in range(3)) for i in range(2)] == h
    for r, c in pivots:
        assert hcols[c][r] > 0
        assert all(hcols[j][r] == 0 for j in range(c + 1, 3))
        assert all(0 <= hcols[j][r] < hcols[c][r] for j in range(c))


def test_f2_examples(single_rule):
    assert f2_solve(F2System.from_dense([[1, 1], [0, 1]], [1, 1])).solution == (0, 1)
    assert f2_solve(F2System.from_dense([[1], [1]], [0, 1])).status == INFEASIBLE
    from rvcutoff.symmetric import parity_system

    eq, _ = parity_system(single_rule)
    assert f2_solve(eq).status == INFEASIBLE


def _follower_parity_system(par):
    # single-rule follower: -2 v + 2k = -par (init row), 2 v - 2k = par (fin row)
    return LinearSystem(((-2, 2), (2, -2)), (-par, par), (INTEGER_NN, INTEGER_NN), ("v", "k"))


def test_ilp_parity_examples():
    # even parity with at least one pair of followers: k = 1
    base = _follower_parity_system(0)
    even = ilp_feasible(LinearSystem(base.matrix + ((0, 1),), base.rhs + (1,), base.tags, base.names))
    assert even.status == FEASIBLE and even.solution["k"] == 1 and even.solution["v"] == 1
    assert ilp_feasible(_follower_parity_system(1)).status == INFEASIBLE
    assert ilp_feasible(LinearSystem(((2,),), (1,), (INTEGER_NN,))).status == INFEASIBLE


def test_ilp_budget_is_reported():
    # x - y = 0 with x, y >= 0 and 3x + 3y = 2: relaxation feasible, lattice infeasible -> infeasible
    assert ilp_feasible(LinearSystem(((3, 3),), (2,), (INTEGER_NN, INTEGER_NN))).status == INFEASIBLE
    # integer points exist but only far away along an unbounded ray: budget matters
    system = LinearSystem(((7, -11),), (1,), (INTEGER_NN, INTEGER_NN), ("x", "y"))
    assert ilp_feasible(system).status == FEASIBLE
    tight = ilp_feasible(system, node_budget=1)
    assert tight.status in (BUDGET_EXCEEDED, FEASIBLE)


def _box_feasible(a, b, bound=8, nonneg=False):
    rng = range(0 if nonneg else -bound, bound + 1)
    return any(
        all(sum(r[j] * y[j] for j in range(len(y))) == bi for r, bi in zip(a, b))
        for y in itertools.product(rng, repeat=len(a[0]))
    )


matrices = st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=3, max_size=3)


@settings(max_examples=120, deadline=None)
@given(matrices, st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_integer_solve_feasible_by_construction(a, y0):
    b = [sum(r[j] * y0[j] for j in range(4)) for r in a]
    system = LinearSystem(tuple(map(tuple, a)), tuple(b), (INTEGER,) * 4)
    r = integer_solve(system)
    assert r.feasible and system.satisfied_by(r.solution)


@settings(max_examples=120, deadline=None)
@given(matrices, st.lists(st.integers(-2, 2), min_size=4, max_size=4), st.integers(0, 2))
def test_integer_solve_parity_family(a, y0, row):
    a2 = [[2 * x for x in r] for r in a]
    b = [sum(r[j] * y0[j] for j in range(4)) for r in a2]
    b[row] += 1
    system = LinearSystem(tuple(map(tuple, a2)), tuple(b), (INTEGER,) * 4)
    assert not integer_solve(system).feasible
    assert not _box_feasible(a2, b, bound=3)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10), st.integers(1, 8), st.data())
def test_f2_matches_enumeration(n, m, data):
    rows = [data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)) for _ in range(m)]
    rhs = data.draw(st.lists(st.integers(0, 1), min_size=m, max_size=m))
    system = F2System.from_dense(rows, rhs)
    truth = any(system.satisfied_by(bits) for bits in itertools.product((0, 1), repeat=n))
    r = f2_solve(system)
    assert r.feasible == truth
    if r.feasible:
        assert system.satisfied_by(r.solution)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=3),
    st.lists(st.integers(-4, 4), min_size=3, max_size=3),
)
def test_lp_answers_carry_certificates(a, b):
    system = LinearSystem(tuple(map(tuple, a)), tuple(b[: len(a)]), (RATIONAL_NN,) * 3)
    r = lp_solve(system)
    if r.feasible:
        assert system.satisfied_by(r.solution)
    else:
        assert r.certificate.verify(system)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=1, max_size=2),
    st.lists(st.integers(0, 3), min_size=3, max_size=3),
    st.booleans(),
)
def test_ilp_matches_box_enumeration(a, y0, perturb):
    b = [sum(r[j] * y0[j] for j in range(3)) + (1 if perturb and i == 0 else 0) for i, r in enumerate(a)]
    system = LinearSystem(tuple(map(tuple, a)), tuple(b), (INTEGER_NN,) * 3)
    r = ilp_feasible(system)
    if r.status == FEASIBLE:
        assert system.satisfied_by(r.solution)
    elif r.status == INFEASIBLE:
        assert not _box_feasible(a, b, bound=8, nonneg=True)
    if not perturb:
        assert r.status == FEASIBLE
