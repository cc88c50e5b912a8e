import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randconvex.concat import PreconditionViolation
from randconvex.condnorm import BlockElement, InvalidEpsilon, conditional_l2_norm_sq
from randconvex.convexity import NormBall, interval_box
from randconvex.l0core import FiniteAtomicSpace, InvalidParameter, RandomVariable, rv
from randconvex.mazur import (
    HullSet,
    NotSeparable,
    RademacherHull,
    cc_hull_member,
    closure_equivalence_check,
    dyadic_epsilon,
    global_sup_functional,
    hull_element,
    lsc_level_set_check,
    mazur_search,
    net_members,
    norm_functional,
    pairing_functional,
    plain_hull_lower_bound,
    separation_functional,
    set_separator,
    sum_preserves_rcc_check,
)
from randconvex.scenarios import cc_fix, example2_space, plain_infeasibility

ints = st.integers(-3, 3)


@st.composite
def hull_instances(draw):
    """At most 3 atoms, one or two F-cells, at most 3 generators and a target."""
    n = draw(st.integers(1, 3))
    space = FiniteAtomicSpace.uniform(n)
    cut = draw(st.integers(1, n))
    blocks = [list(range(cut))] + ([list(range(cut, n))] if cut < n else [])
    F = space.algebra(blocks)
    g = draw(st.integers(1, 3))
    gens = [RandomVariable(space.fine, tuple(Fraction(draw(ints)) for _ in range(n))) for _ in range(g)]
    X = RandomVariable(space.fine, tuple(Fraction(draw(ints)) for _ in range(n)))
    return F, gens, X


def grid_residual(F, gens, X, i, den=12):
    """Brute-force minimum of the squared residual over a weight grid on cell i."""
    best = None
    for comp in itertools.product(range(den + 1), repeat=len(gens)):
        if sum(comp) != den:
            continue
        w = [Fraction(c, den) for c in comp]
        Z = hull_element(gens, [w] * len(F), F).element
        r = conditional_l2_norm_sq(X - Z, F).values[i]
        best = r if best is None else min(best, r)
    return best


@settings(max_examples=60, deadline=None)
@given(hull_instances())
def test_cc_residual_against_grid_oracle(inst):
    F, gens, X = inst
    res = mazur_search(gens, X, RandomVariable.constant(F, 1), force=True, F=F)
    glued = [grid_residual(F, gens, X, i) for i in range(len(F))]
    for r, g in zip(res.residual_sq.values, glued):
        assert 0 <= r <= g
    # a glued grid point is itself a concatenation, so its residual bounds ours cellwise
    plain = mazur_search(gens, X, RandomVariable.constant(F, 1), "plain", 1, force=True, F=F)
    assert all(a <= b for a, b in zip(res.residual_sq.values, plain.residual_sq.values))


@settings(max_examples=40, deadline=None)
@given(hull_instances())
def test_hull_member_roundtrip(inst):
    F, gens, _ = inst
    w = [[Fraction(j + 1 + i, 1) for j in range(len(gens))] for i in range(len(F))]
    w = [[x / sum(row) for x in row] for row in w]
    H = hull_element(gens, w, F)
    assert H.verify()
    ok, found = cc_hull_member(gens, H.element, F)
    assert ok and found.verify()
    assert conditional_l2_norm_sq(found.element - H.element, F).values == (0,) * len(F)


def test_precondition_and_epsilon():
    E = FiniteAtomicSpace.uniform(2).fine
    gens = [rv(E, 1, 0)]
    with pytest.raises(PreconditionViolation):
        mazur_search(gens, rv(E, 0, 0), RandomVariable.constant(E, 1))
    with pytest.raises(InvalidEpsilon):
        mazur_search(gens, rv(E, 0, 0), RandomVariable.constant(E, 0), force=True)
    with pytest.raises(InvalidParameter):
        mazur_search(gens, rv(E, 0, 0), RandomVariable.constant(E, 1), "other", force=True)


def test_plain_infeasible_and_bound():
    for N in range(1, 4):
        assert plain_infeasibility(N, 4, dyadic_epsilon).ok
        assert plain_hull_lower_bound(N).ok
    with pytest.raises(InvalidParameter):
        plain_hull_lower_bound(2, [(1, 1), (1, 2)], blocks=2)


def test_cc_fix_exact_residuals():
    c = cc_fix(4)
    assert c.ok
    res = c.details["search"]
    assert res.residual_sq.values == tuple(Fraction(1, 2 ** (k + 1)) for k in range(1, 5))


def test_cc_beats_plain_on_net():
    space = example2_space(3)
    gens = net_members(space, range(1, 17))
    zero = BlockElement.zero(space)
    eps = dyadic_epsilon(space.coarse)
    cc = mazur_search(gens, zero, eps, squared=True, force=True)
    assert cc.feasible
    assert cc.residual_sq.values == (Fraction(1, 16),) * 3


def test_separation_example():
    sp = FiniteAtomicSpace.uniform(2)
    E, F = sp.fine, sp.algebra([[0, 1]])
    gens = [rv(E, 2, 0), rv(E, 0, 2)]
    cert = separation_functional(gens, rv(E, 0, 0), Fraction(1, 4), F=F)
    a, b = cert.Y.values
    assert a == b < 0
    assert all(cert.verified.values())
    assert all(v > 1 for i, v in enumerate(cert.gauge_lower.values) if i in cert.C.cells)
    with pytest.raises(NotSeparable):
        separation_functional(gens, rv(E, 1, 1), Fraction(1, 4), F=F)


def test_set_separators():
    E = FiniteAtomicSpace.uniform(2).fine
    box = interval_box(E, -1, 2)
    cert = set_separator(box, rv(E, 3, 0))
    assert cert is not None and all(cert.verified.values())
    assert set_separator(box, rv(E, 1, 0)) is None
    ball = NormBall(E, 1)
    assert all(set_separator(ball, rv(E, 2, 0)).verified.values())


def test_closure_equivalence_finite():
    sp = FiniteAtomicSpace.uniform(4)
    G = sp.algebra([[0, 1], [2, 3]])
    like = RandomVariable.constant(sp.fine, 0)
    for K in (NormBall(G, 1), interval_box(sp.fine, -1, 2),
              HullSet(G, [rv(sp.fine, 1, 0, 0, 1), rv(sp.fine, 0, 2, -1, 0)])):
        f = closure_equivalence_check(K, like, trials=8)
        assert f.status("closures-coincide") == "pass" and f.ok


def test_example2_closures():
    space = example2_space(4)
    plain = closure_equivalence_check(RademacherHull(space, 2, "plain"))
    assert plain.status("closures-coincide") == "fail" and plain.ok
    assert plain.status("norm-separated") == "pass"
    cc = closure_equivalence_check(RademacherHull(space, 2, "cc"))
    assert cc.status("closures-coincide") == "prefix-only" and cc.ok


def test_lsc_functionals():
    sp = FiniteAtomicSpace.uniform(4)
    G = sp.algebra([[0, 1], [2, 3]])
    like = RandomVariable.constant(sp.fine, 0)
    levels = [RandomVariable.constant(G, 1)]
    f = lsc_level_set_check(norm_functional(G), levels, like, 10)
    assert f.ok and f.status("weakly-lsc") == "pass"
    Y = rv(sp.fine, 1, -2, Fraction(1, 2), 3)
    assert lsc_level_set_check(pairing_functional(Y, G), levels, like, 10).ok
    g = lsc_level_set_check(global_sup_functional(sp.fine), [RandomVariable.constant(sp.fine, 1)], like, 10)
    assert g.status("local-property") == "fail"
    with pytest.raises(KeyError):
        g["weakly-lsc"]


def test_sum_preserves_rcc():
    sp = FiniteAtomicSpace.uniform(3)
    E = sp.fine
    f = sum_preserves_rcc_check(NormBall(E, 1), NormBall(E, 2), 10)
    assert f.ok and f.status("rcc-sum") == "pass"
    L = HullSet(E, [rv(E, 1, 0, 0), rv(E, 0, 1, 0)])
    M = HullSet(E, [rv(E, 0, 0, 1), rv(E, -1, 0, 0)])
    assert sum_preserves_rcc_check(L, M, 10).status("rcc-sum") == "pass"
