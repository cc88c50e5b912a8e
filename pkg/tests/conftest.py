from fractions import Fraction

import pytest
from hypothesis import strategies as st

from randconvex.l0core import FiniteAtomicSpace, RandomVariable, build_dyadic_space

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=12)
positive = st.fractions(min_value=Fraction(1, 16), max_value=8, max_denominator=12)


@st.composite
def finite_spaces(draw, max_atoms=4):
    n = draw(st.integers(1, max_atoms))
    w = draw(st.lists(st.integers(1, 6), min_size=n, max_size=n))
    return FiniteAtomicSpace(tuple(range(n)), tuple(Fraction(x, sum(w)) for x in w))


@st.composite
def partitions(draw, space):
    """A random coarsening of the atoms of ``space``."""
    n = len(space.atoms)
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    groups = {}
    for atom, lab in zip(space.atoms, labels):
        groups.setdefault(lab, []).append(atom)
    return space.algebra(list(groups.values()))


@st.composite
def variables(draw, algebra, values=rationals):
    vals = draw(st.lists(values, min_size=len(algebra), max_size=len(algebra)))
    return RandomVariable(algebra, tuple(vals))


@st.composite
def space_and_vars(draw, count=2, values=rationals):
    sp = draw(finite_spaces())
    return (sp,) + tuple(draw(variables(sp.fine, values)) for _ in range(count))


@pytest.fixture
def two_atoms():
    return FiniteAtomicSpace.uniform(2)


@pytest.fixture
def dyadic4():
    return build_dyadic_space(4, (2, 2, 1, 1))
