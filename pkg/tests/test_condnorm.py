from fractions import Fraction

import pytest
from hypothesis import given

from conftest import finite_spaces, partitions, variables
from hypothesis import strategies as st
from randconvex.condnorm import (
    BlockElement,
    InvalidEpsilon,
    abs_conditional_mean,
    conditional_expectation,
    conditional_inner,
    conditional_l2,
    conditional_l2_norm_sq,
    neighborhood_member,
    seminorm_axioms_check,
    sqrt_bracket,
    squared_sum_bound,
    squared_triangle_holds,
)
from randconvex.l0core import FiniteAtomicSpace, RandomVariable, build_dyadic_space, rv


@st.composite
def conditioned(draw):
    sp = draw(finite_spaces())
    F = draw(partitions(sp))
    return F, draw(variables(sp.fine)), draw(variables(sp.fine))


@given(conditioned())
def test_norm_matches_conditional_expectation(data):
    F, X, _ = data
    assert conditional_l2_norm_sq(X, F).values == conditional_expectation(X * X, F).values


@given(conditioned())
def test_tower_and_pull_out(data):
    F, X, Y = data
    assert conditional_expectation(conditional_expectation(X, F), F).values == conditional_expectation(X, F).values
    Z = conditional_expectation(Y, F)
    assert conditional_inner(X, Z, F).values == (conditional_expectation(X, F) * Z).values


def test_conditional_expectation_example():
    sp = FiniteAtomicSpace((0, 1, 2), (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)))
    F = sp.algebra([[0, 1], [2]])
    assert conditional_expectation(rv(sp.fine, 2, 4, 7), F).values == (3, 7)


def test_dyadic_norm_and_block_element():
    sp = build_dyadic_space(2, (2, 1))
    X = RandomVariable(sp.fine, tuple(Fraction(v) for v in (1, -1, 2, 0, 3, 5)))
    B = BlockElement.from_rv(X)
    assert B.to_rv().same_values(X)
    assert conditional_l2_norm_sq(B).values == conditional_l2_norm_sq(X).values == (Fraction(3, 2), 17)
    assert conditional_inner(B, X).values == conditional_l2_norm_sq(X).values


def test_seminorm_suites():
    sp = FiniteAtomicSpace.uniform(4)
    G = sp.algebra([[0, 1], [2, 3]])
    like = RandomVariable.constant(sp.fine, 0)
    good = seminorm_axioms_check(conditional_l2(G), like, G, 40, 1)
    assert good.ok
    bad = seminorm_axioms_check(abs_conditional_mean(G), like, G, 40, 1)
    assert bad.status("definiteness") == "fail"
    assert bad["definiteness"].details["witness"] is not None
    assert bad.status("triangle") == "pass"


def test_sqrt_helpers():
    lo, hi = sqrt_bracket(Fraction(2), Fraction(1, 2**30))
    assert lo * lo <= 2 <= hi * hi and hi - lo <= Fraction(1, 2**30)
    assert squared_triangle_holds(Fraction(9), Fraction(4), Fraction(1))
    assert not squared_triangle_holds(Fraction(10), Fraction(4), Fraction(1))
    assert squared_sum_bound(Fraction(36), [Fraction(4), Fraction(1), Fraction(9)])


def test_neighborhood_member():
    sp = FiniteAtomicSpace.uniform(2)
    q = conditional_l2(sp.fine)
    eps = rv(sp.fine, 1, 1)
    assert neighborhood_member([q], eps, rv(sp.fine, Fraction(1, 2), -1))
    assert not neighborhood_member([q], eps, rv(sp.fine, 2, 0))
    with pytest.raises(InvalidEpsilon):
        neighborhood_member([q], rv(sp.fine, 0, 1), rv(sp.fine, 0, 0))
