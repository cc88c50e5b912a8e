import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rationals
from randconvex.hull import is_diagonal, min_norm_point, optimal, quad, solve
from randconvex.walsh import WalshSeries, fwht


def cells(depth):
    return st.lists(rationals, min_size=2**depth, max_size=2**depth)


def test_rademacher_cells():
    assert WalshSeries.rademacher(1).to_cells(2) == [1, 1, -1, -1]
    assert WalshSeries.rademacher(2).to_cells(3) == [1, 1, -1, -1, 1, 1, -1, -1]
    assert WalshSeries.rademacher(3).value_at(Fraction(1, 8)) == -1


def test_fwht_is_involution_up_to_scale():
    v = [Fraction(x) for x in (3, -1, 2, 5)]
    assert [x / 4 for x in fwht(fwht(v))] == v


@given(st.integers(0, 4).flatmap(lambda d: st.tuples(cells(d), cells(d))))
def test_cells_roundtrip_and_parseval(pair):
    a, b = pair
    d = len(a).bit_length() - 1
    sa, sb = WalshSeries.from_cells(a), WalshSeries.from_cells(b)
    assert sa.to_cells(d) == a
    assert sa.dot(sb) == sum(x * y for x, y in zip(a, b)) / len(a)
    assert sa.mean() == sum(a) / len(a)
    assert (sa * sb).to_cells(d) == [x * y for x, y in zip(a, b)]


def test_rademacher_orthonormal():
    r = [WalshSeries.rademacher(level) for level in range(1, 6)]
    for i, j in itertools.product(range(5), repeat=2):
        assert r[i].dot(r[j]) == (1 if i == j else 0)


def test_solve():
    A = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    assert solve(A, [Fraction(3), Fraction(5)]) == [Fraction(4, 5), Fraction(7, 5)]


def test_min_norm_diagonal_closed_form():
    G = [[Fraction(1), 0, 0], [0, Fraction(2), 0], [0, 0, Fraction(4)]]
    assert is_diagonal(G)
    w, v = min_norm_point(G)
    assert v == Fraction(4, 7)
    assert w == [Fraction(4, 7), Fraction(2, 7), Fraction(1, 7)]


points = st.lists(st.lists(st.integers(-5, 5), min_size=2, max_size=2), min_size=1, max_size=4)


@settings(max_examples=80)
@given(points)
def test_min_norm_point_against_grid(pts):
    P = [[Fraction(x) for x in p] for p in pts]
    G = [[sum(a * b for a, b in zip(p, q)) for q in P] for p in P]
    w, v = min_norm_point(G)
    assert sum(w) == 1 and min(w) >= 0
    assert optimal(G, w)
    n = len(P)
    for comp in itertools.product(range(7), repeat=n):
        if sum(comp) == 6:
            assert v <= quad(G, [Fraction(c, 6) for c in comp])


def test_min_norm_point_segment():
    # segment from (1,-1) to (-1,1): origin is the midpoint
    G = [[Fraction(2), Fraction(-2)], [Fraction(-2), Fraction(2)]]
    w, v = min_norm_point(G)
    assert v == 0 and w == [Fraction(1, 2), Fraction(1, 2)]


def test_min_norm_point_empty():
    with pytest.raises(ValueError):
        min_norm_point([])
