import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import space_and_vars
from randconvex.concat import (
    ArityError,
    ContractViolation,
    cc_closure,
    cc_closure_member,
    eps_optimal_selection,
    glue,
    has_rcc,
    partition_from_labels,
    scaling_selection,
)
from randconvex.condnorm import InvalidEpsilon
from randconvex.convexity import AbsorbencyFailure, FiniteSet, NormBall, PolytopeSet, interval_box
from randconvex.l0core import CountablePartition, EventSet, FiniteAtomicSpace, RandomVariable, rv


@pytest.fixture
def E():
    return FiniteAtomicSpace.uniform(2).fine


@given(space_and_vars(2))
def test_glue_identity(data):
    sp, X, Y = data
    E = sp.fine
    n = len(E)
    for mask in range(2 ** n):
        a = EventSet(E, {i for i in range(n) if mask >> i & 1})
        part = CountablePartition.from_events([a, a.complement()])
        Z = glue(part, [X, Y])
        assert all(Z.values[i] == (X if i in a.cells else Y).values[i] for i in range(n))


def test_glue_arity(E):
    part = CountablePartition.from_events([EventSet(E, {0})])
    with pytest.raises(ArityError):
        glue(part, [rv(E, 1, 1)])
    assert glue(part, [rv(E, 1, 1), rv(E, 5, 5)]).values == (1, 5)


def test_cc_membership(E):
    K = FiniteSet(E, [rv(E, 0, 0), rv(E, 1, 1)])
    ok, wit = cc_closure_member(K, rv(E, 0, 1))
    assert ok and wit.verify()
    ok, wit = cc_closure_member(K, rv(E, 2, 0))
    assert not ok and wit is None


def test_cc_closure_is_all_gluings(E):
    gens = [rv(E, 0, 0), rv(E, 1, 1)]
    got = {X.values for X in cc_closure(gens, E)}
    assert got == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_rcc_decisions(E):
    K = FiniteSet(E, [rv(E, 0, 0), rv(E, 1, 1)])
    d = has_rcc(K)
    assert not d and d.counterwitness is not None
    assert d.counterwitness["glued"].values in {(0, 1), (1, 0)}
    assert has_rcc(interval_box(E, 0, 1))
    assert has_rcc(NormBall(E, 1))


def test_partition_from_labels(E):
    part, order = partition_from_labels(E, [3, 1])
    assert order == [1, 3]
    assert [sorted(e.cells) for e in part.events] == [[1], [0]]


def test_selection_example(E):
    sel = eps_optimal_selection(lambda k: rv(E, Fraction(1, k), 1 + Fraction(1, k)), rv(E, 0, 1),
                                RandomVariable.constant(E, Fraction(1, 2)))
    assert sel.value.values == (Fraction(1, 3), Fraction(4, 3))
    assert sel.sandwich
    with pytest.raises(InvalidEpsilon):
        eps_optimal_selection(lambda k: rv(E, 1, 1), rv(E, 0, 0), RandomVariable.constant(E, 0))
    with pytest.raises(ContractViolation):
        eps_optimal_selection(lambda k: rv(E, k, k), rv(E, 0, 0), RandomVariable.constant(E, 1))


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(1, 20), st.integers(0, 6)), min_size=1, max_size=4),
       st.integers(1, 40))
def test_selection_against_first_hit(rows, den):
    n = len(rows)
    E = FiniteAtomicSpace.uniform(n).fine

    def member(k):
        return RandomVariable(E, tuple(Fraction(f) if h and k >= h else f + Fraction(c, k) for f, c, h in rows))

    floor = RandomVariable(E, tuple(Fraction(f) for f, _, _ in rows))
    eps = RandomVariable.constant(E, Fraction(1, den))
    sel = eps_optimal_selection(member, floor, eps)
    for i, (f, c, h) in enumerate(rows):
        k = next(k for k in itertools.count(1) if member(k).values[i] < f + Fraction(1, den))
        assert sel.value.values[i] == member(k).values[i]


def test_scaling_selection(E):
    K = NormBall(E, 1)
    eps = RandomVariable.constant(E, Fraction(1, 4))
    Y = scaling_selection(K, rv(E, 2, 3), eps)
    assert 2 <= Y.values[0] < Fraction(9, 4) and 3 <= Y.values[1] < Fraction(13, 4)
    assert 2 <= Y.values[0] < 3 and 3 <= Y.values[1] < 4
    assert scaling_selection(K, rv(E, 0, 0), eps).values == (Fraction(1, 8),) * 2
    flat = PolytopeSet(E, [[((1,), 1)], [((1,), 0), ((-1,), 0)]])
    with pytest.raises(AbsorbencyFailure):
        scaling_selection(flat, rv(E, 1, 1), eps)
