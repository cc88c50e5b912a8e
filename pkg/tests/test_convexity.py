import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randconvex.condnorm import conditional_l2_norm_sq, sqrt_bracket
from randconvex.convexity import (
    AbsorbencyFailure,
    ExceptionalUnitBall,
    NormBall,
    PolytopeSet,
    check_convex_absorbent_balanced,
    gauge,
    gauge_bruteforce,
    gauge_degenerate_scenario,
    interval_box,
    sublevel_closure_check,
)
from randconvex.l0core import FiniteAtomicSpace, RandomVariable, TailRule, build_dyadic_space, rv
from randconvex.scenarios import example1_variables, facet_ratio_oracle, random_polytope


@pytest.fixture
def E():
    return FiniteAtomicSpace.uniform(2).fine


def test_box_gauge(E):
    K = interval_box(E, -1, 2)
    assert gauge(K, rv(E, -2, -2)).lower.values == (2, 2)
    g = gauge(K, rv(E, 2, 2))
    assert g.exact and g.upper.values == (1, 1)
    assert gauge(K, rv(E, 0, 0)).upper.values == (0, 0)


def test_norm_ball_bracket_contains_norm():
    sp = FiniteAtomicSpace.uniform(4)
    G = sp.algebra([[0, 1], [2, 3]])
    X = rv(sp.fine, 1, 3, -2, 0)
    g = gauge(NormBall(G, 1), X, Fraction(1, 2**20))
    for lo, hi, n2 in zip(g.lower.values, g.upper.values, conditional_l2_norm_sq(X, G).values):
        a, b = sqrt_bracket(n2, Fraction(1, 2**30))
        assert lo <= b and a <= hi


def test_half_plane_is_not_balanced():
    sp = FiniteAtomicSpace.uniform(2)
    F = sp.algebra([[0, 1]])
    K = PolytopeSet(F, [[((1, 1), 1)]], name="x+y<=1")
    f = check_convex_absorbent_balanced(K, RandomVariable.constant(sp.fine, 0), trials=20, seed=0)
    assert f.status("convex") == "pass"
    assert f.status("balanced") == "fail"
    assert f["balanced"].details["witness"]["Y"].values == (-1,)


def test_absorbency_failure(E):
    K = PolytopeSet(E, [[((1,), 1)], [((1,), 0), ((-1,), 0)]], name="degenerate")
    with pytest.raises(AbsorbencyFailure) as info:
        gauge(K, rv(E, 1, 1))
    assert info.value.cells


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_exact_gauge_matches_oracle(seed):
    rng = random.Random(seed)
    sp = FiniteAtomicSpace.uniform(4)
    G = sp.algebra([[0, 1], [2, 3]])
    K = random_polytope(G, rng)
    X = RandomVariable(sp.fine, tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(4)))
    g = gauge(K, X).lower
    # scaling by the gauge lands on the boundary; any smaller scaling leaves K
    for i, y in enumerate(g.values):
        v = [X.values[a] for a in G.cells[i]]
        if y == 0:
            assert all(K.cell_member(i, [t * k for t in v]) for k in (1, 10, 1000))
            continue
        assert K._ok(i, [t / y for t in v], False)
        assert not K._ok(i, [t / (y * Fraction(63, 64)) for t in v], False)
    assert g.values == facet_ratio_oracle(K, X)


def test_bruteforce_brackets_exact(E):
    K = interval_box(E, -1, 2)
    X = rv(E, 3, -1)
    g = gauge_bruteforce(K, X, [Fraction(k, 4) for k in range(1, 20)])
    assert g.contains(gauge(K, X).lower)


def test_unit_ball_U():
    sp = build_dyadic_space(4, (1,) * 4)
    U = ExceptionalUnitBall(sp)
    two = RandomVariable(sp.fine, (Fraction(2),) * len(sp.fine), TailRule.constant(2))
    assert not U.contains(two)
    f = check_convex_absorbent_balanced(U, RandomVariable.constant(sp.fine, 0), trials=10, seed=0)
    assert f.status("convex") == "pass" and f.status("absorbent") == "pass"
    assert not U.rcc_counterwitness()["glued_in_set"]


def test_degenerate_gauge_certificate():
    sp = build_dyadic_space(5, (1,) * 5)
    X = example1_variables(sp)["X=2"]
    deltas = [Fraction(1, 2**k) for k in range(1, 11)]
    cert = gauge_degenerate_scenario(X, deltas)
    assert cert.valid and cert.scope == "exact"
    assert cert.x_in_U is False
    fam = cert.families[0]
    assert [n for n, _, _ in fam] == list(range(1, 6))
    assert all(max(exc, default=0) <= n for n, _, exc in fam)


def test_sublevel_on_U_strict_inclusion():
    sp = build_dyadic_space(4, (1,) * 4)
    U = ExceptionalUnitBall(sp)
    f = sublevel_closure_check(U, list(example1_variables(sp).values()))
    assert f.status("zero-interior") == "pass"
    assert f.status("sublevel-equals-closure") == "fail"
    assert f["sublevel-equals-closure"].expected == "fail"
    assert f.status("strict-inclusion") == "pass"


def test_open_box_closure_is_sublevel(E):
    K = interval_box(E, -1, 2, strict=True)
    samples = [rv(E, 2, -1), rv(E, 1, 0), rv(E, 3, 0), rv(E, Fraction(1, 2), -2)]
    f = sublevel_closure_check(K, samples)
    assert f.status("sublevel-equals-closure") == "pass"
    assert not K.contains(rv(E, 2, -1)) and K.closure_contains(rv(E, 2, -1))
