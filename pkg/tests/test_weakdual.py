from fractions import Fraction

import pytest

from randconvex.condnorm import BlockElement
from randconvex.l0core import DyadicBlockSpace
from randconvex.weakdual import (
    DepthError,
    InvalidBattery,
    RademacherNet,
    cauchy_schwarz_holds,
    linear_test_vector,
    pairing,
    rademacher_net_element,
    rademacher_sign,
    rademacher_walsh,
    step_battery,
    weak_convergence_check,
)


def test_sign_from_the_sine():
    # block 1, n=1: frequency 4 on [1/2, 1); the first eighth is positive
    assert rademacher_sign(1, 1, Fraction(9, 16)) == 1
    assert rademacher_sign(1, 1, Fraction(11, 16)) == -1
    with pytest.raises(Exception):
        rademacher_sign(1, 1, Fraction(5, 8))


def test_explicit_and_walsh_forms_agree():
    sp = DyadicBlockSpace(3, (4, 4, 4))
    for N in range(0, 4):
        net = RademacherNet.constant(N, 3)
        explicit = BlockElement.from_rv(rademacher_net_element(sp, net))
        assert explicit.blocks == rademacher_walsh(sp, net).blocks


def test_explicit_needs_depth():
    sp = DyadicBlockSpace(2, (1, 1))
    with pytest.raises(DepthError):
        rademacher_net_element(sp, RademacherNet.constant(1, 2))


def test_exact_vanishing_law():
    sp = DyadicBlockSpace(4, (0,) * 4)
    battery = step_battery(sp, 12, 5, seed=3)
    for N in range(0, 6):
        X = rademacher_walsh(sp, RademacherNet.constant(N, 4))
        for D in battery:
            d = D.depth()
            for k, v in enumerate(pairing(X, D).values, start=1):
                if k + N + 1 > d:
                    assert v == 0


def test_pairing_nonzero_when_resolved():
    sp = DyadicBlockSpace(1, (3,))
    X = rademacher_walsh(sp, RademacherNet.constant(1, 1))
    D, err = linear_test_vector(sp, 3)
    # Y(t) = t is increasing, so it correlates negatively with a +/- pattern
    assert pairing(X, D).values[0] < 0
    assert err.values == (Fraction(1, 4 ** 4 * 12),)


def test_weak_convergence_report():
    sp = DyadicBlockSpace(3, (0,) * 3)
    battery = step_battery(sp, 10, 4, seed=0)
    f = weak_convergence_check(lambda n: rademacher_walsh(sp, RademacherNet.constant(n, 3)),
                               BlockElement.zero(sp), battery, range(1, 9))
    assert f.status("exact-vanishing-law") == "pass"
    assert f.status("weakly-convergent") == "prefix-only"
    assert f.ok
    with pytest.raises(InvalidBattery):
        weak_convergence_check(lambda n: None, BlockElement.zero(sp), [], [1])


def test_cauchy_schwarz():
    sp = DyadicBlockSpace(3, (2, 2, 2))
    X = rademacher_walsh(sp, RademacherNet((0, 1, 0), 0))
    for D in step_battery(sp, 6, 4, seed=5):
        assert cauchy_schwarz_holds(X, D)
