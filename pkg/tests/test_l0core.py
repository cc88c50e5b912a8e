from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import space_and_vars
from randconvex.l0core import (
    INF,
    CountableFamily,
    CountablePartition,
    DyadicBlockSpace,
    EmptyFamily,
    EventSet,
    FiniteAtomicSpace,
    IncompatibleOperands,
    InvalidParameter,
    OracleViolation,
    RandomVariable,
    TailRule,
    block_step_from_dict,
    block_step_to_dict,
    build_dyadic_space,
    compare,
    essinf,
    esssup,
    fmt,
    lattice,
    monotone_approximation,
    parse,
    rv,
    space_from_dict,
    space_to_dict,
    whole,
)


def test_space_validation():
    with pytest.raises(InvalidParameter):
        FiniteAtomicSpace((0, 1), (Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(InvalidParameter):
        FiniteAtomicSpace((0, 0), (Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(InvalidParameter):
        build_dyadic_space(0, (1,))
    with pytest.raises(InvalidParameter):
        build_dyadic_space(2, (1, 0))


def test_dyadic_masses():
    sp = build_dyadic_space(3, (1, 1, 2))
    assert sp.tail_mass == Fraction(1, 8)
    assert sum(sp.prob) + sp.tail_mass == 1
    assert sp.block_prob(2) == Fraction(1, 4)
    assert sp.cell_interval((1, 1)) == (Fraction(3, 4), Fraction(1))
    assert sp.coarse.total_probability() == 1


def test_fmt_parse_roundtrip():
    for x in (Fraction(3, 7), Fraction(-2), INF, -INF):
        assert parse(fmt(x)) == x


def test_compare_examples(two_atoms):
    E = two_atoms.fine
    X, Y = rv(E, 1, 2), rv(E, 1, 3)
    assert compare(Y, X)
    assert not compare(Y, X, "gt")
    assert compare(Y, X, "gt", on=EventSet(E, {1}))


def test_compare_lazy_tail():
    sp = DyadicBlockSpace(2, (0, 0))
    F = sp.coarse
    X = RandomVariable(F, (Fraction(1), Fraction(1)), TailRule.geometric(1, Fraction(1, 2)))
    Y = RandomVariable(F, (Fraction(0), Fraction(0)), TailRule.constant(0))
    v = compare(X, Y, "gt")
    assert v and v.scope == "exact"
    unknown = RandomVariable(F, (Fraction(2), Fraction(2)))
    assert compare(unknown, X).scope == "prefix-only"


@given(space_and_vars(3))
def test_lattice_laws(data):
    _, X, Y, Z = data
    meet, join = lattice(X, Y, "meet"), lattice(X, Y, "join")
    assert meet.same_values(lattice(Y, X, "meet"))
    assert lattice(lattice(X, Y), Z).same_values(lattice(X, lattice(Y, Z)))
    assert lattice(X, join, "meet").same_values(X)
    assert compare(X, meet) and compare(join, Y)
    assert (meet + join).same_values(X + Y)


@given(space_and_vars(2))
def test_compare_antisymmetry(data):
    _, X, Y = data
    if compare(X, Y) and compare(Y, X):
        assert X.same_values(Y)
    assert bool(compare(X, Y, "gt")) == (bool(compare(X, Y)) and all(a != b for a, b in zip(X.values, Y.values)))


@given(space_and_vars(3))
def test_esssup_is_least_upper_bound(data):
    _, X, Y, Z = data
    s = esssup([X, Y, Z])
    assert all(compare(s, W) for W in (X, Y, Z))
    assert any(s.values[i] == W.values[i] for W in (X, Y, Z) for i in range(len(s.values)))
    assert essinf([X, Y]).same_values(-esssup([-X, -Y]))


def test_ess_empty():
    with pytest.raises(EmptyFamily):
        esssup([])


def test_countable_esssup_bracket(two_atoms):
    E = two_atoms.fine
    fam = CountableFamily(lambda n: rv(E, 1 - Fraction(1, n), 2 - Fraction(1, 2**n)), upper=rv(E, 1, 2))
    b = esssup(fam, Fraction(1, 100))
    assert b.terms_used == 100
    assert all(u - l <= Fraction(1, 100) for l, u in zip(b.lower.values, b.upper.values))
    bad = CountableFamily(lambda n: rv(E, n, 0), upper=rv(E, 1, 1))
    with pytest.raises(OracleViolation):
        esssup(bad, Fraction(1, 2))


def test_monotone_approximation_reaches_sup(two_atoms):
    E = two_atoms.fine
    fam = [rv(E, 1, 0), rv(E, 0, 1), rv(E, 1, 1)]
    seq = monotone_approximation(fam, lambda a, b: rv(E, 1, 1))
    assert seq[-1].same_values(esssup(fam))


def test_arithmetic_across_algebras():
    sp = FiniteAtomicSpace.uniform(4)
    G = sp.algebra([[0, 1], [2, 3]])
    X = rv(sp.fine, 1, 2, 3, 4)
    Y = rv(G, 10, 20)
    assert (X + Y).values == (11, 12, 23, 24)
    other = FiniteAtomicSpace.uniform(3)
    with pytest.raises(IncompatibleOperands):
        X + rv(other.fine, 1, 2, 3)


def test_partition_and_events():
    sp = FiniteAtomicSpace.uniform(3)
    E = sp.fine
    a, b = EventSet(E, {0}), EventSet(E, {1})
    part = CountablePartition.from_events([a, b])
    assert part.remainder.cells == frozenset({2})
    assert whole(E).measure == 1
    assert a.complement().measure == Fraction(2, 3)
    with pytest.raises(InvalidParameter):
        CountablePartition.from_events([a, EventSet(E, {0, 1})])


def test_serialisation_roundtrip():
    sp = build_dyadic_space(2, (1, 1))
    assert space_from_dict(space_to_dict(sp)) == sp
    X = RandomVariable(sp.fine, (Fraction(1, 3), Fraction(2), Fraction(-1), Fraction(0)))
    assert block_step_from_dict(sp, block_step_to_dict(X)).same_values(X)


@settings(max_examples=50)
@given(st.fractions(-4, 4, max_denominator=8), st.fractions(-4, 4, max_denominator=8), st.integers(1, 6))
def test_tail_rule_sign(c1, c2, start):
    t = TailRule(((Fraction(1, 2), c1), (Fraction(1), c2)))
    d = t.sign_decision(start, False)
    values = [t.value(n) for n in range(start, start + 60)]
    if d:
        assert all(v >= 0 for v in values)
    elif d is False:
        assert any(v < 0 for v in values)


def test_dyadic_space_is_lazy():
    assert isinstance(build_dyadic_space(1, (1,)), DyadicBlockSpace)
    assert build_dyadic_space(1, (1,)).lazy
