"""Dual pairing through conditional expectation, the Rademacher net and
weak-convergence checks against a battery of test vectors."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .condnorm import (
    BlockElement,
    ConditionalSeminorm,
    Element,
    conditional_inner,
    conditional_l2_norm_sq,
)
from .l0core import (
    DyadicBlockSpace,
    InvalidParameter,
    RandomVariable,
    SigmaAlgebra,
)
from .report import FAIL, PASS, PREFIX_ONLY, Check, Findings
from .walsh import WalshSeries


class DepthError(InvalidParameter):
    pass


class InvalidBattery(InvalidParameter):
    pass


@dataclass(frozen=True)
class DualVector:
    """The functional ``X -> E[XY | F]`` represented by the element ``Y``."""

    Y: Element
    F: SigmaAlgebra | None = None
    name: str = ""

    def __call__(self, X: Element) -> RandomVariable:
        return pairing(X, self)

    def seminorm(self) -> ConditionalSeminorm:
        def sq(X):
            v = pairing(X, self)
            return v * v
        return ConditionalSeminorm(f"q[{self.name}]", sq, False)

    def depth(self) -> int:
        if isinstance(self.Y, BlockElement):
            return self.Y.depth()
        return element_depth(self.Y)


def pairing(X: Element, D: DualVector) -> RandomVariable:
    """``<X, D> = E[X Y_D | F]``."""
    return conditional_inner(X, D.Y, D.F)


def element_depth(X: RandomVariable) -> int:
    """Absolute dyadic depth of a fine-algebra variable on a dyadic space."""
    sp = X.space
    if not isinstance(sp, DyadicBlockSpace):
        raise InvalidParameter("depth is defined on dyadic spaces")
    return BlockElement.from_rv(X).depth()


# ---------------------------------------------------------------------------
# the Rademacher net


@dataclass(frozen=True)
class RademacherNet:
    """Multi-index ``{n_k}``: realised prefix plus a default index for later blocks.

    On block ``A_k`` the member is ``sgn sin(2 pi 2**(k + n_k) t)``, i.e. the
    Rademacher function of level ``n_k + 1`` in block-relative coordinates.
    """

    prefix: tuple
    default: int = 1

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(n) for n in self.prefix))
        if any(n < 0 for n in self.prefix) or self.default < 0:
            raise InvalidParameter("indices must be non-negative")

    @classmethod
    def constant(cls, N: int, blocks: int) -> "RademacherNet":
        return cls((N,) * blocks, N)

    def index(self, k: int) -> int:
        return self.prefix[k - 1] if k <= len(self.prefix) else self.default

    def frequency(self, k: int) -> int:
        return 2 ** (k + self.index(k))

    def level(self, k: int) -> int:
        return self.index(k) + 1


def rademacher_walsh(space: DyadicBlockSpace, net: RademacherNet) -> BlockElement:
    """The net member as a Walsh-form element (any frequency)."""
    blocks = tuple(WalshSeries.rademacher(net.level(k)) for k in range(1, space.blocks + 1))
    tail = WalshSeries.rademacher(net.default + 1) if space.lazy else None
    return BlockElement(space, blocks, tail)


def rademacher_sign(k: int, n: int, t: Fraction) -> int:
    """``sgn sin(2 pi (2**(k+n) t - 1))`` at an interior point ``t`` of a cell."""
    frac = (2 ** (k + n) * t) % 1
    if frac == 0 or frac == Fraction(1, 2):
        raise InvalidParameter("sign evaluated on a zero of the sine")
    return 1 if frac < Fraction(1, 2) else -1


def rademacher_net_element(space: DyadicBlockSpace, net: RademacherNet) -> RandomVariable:
    """The net member as an explicit step function on the fine cells.

    Each fine cell of block k must be no longer than half a period, i.e. the
    block depth must be at least ``n_k + 1`` (absolute depth ``k + n_k + 1``).
    The sign is read off at the cell midpoint straight from the sine formula.
    """
    for k in range(1, space.blocks + 1):
        need = net.index(k) + 1
        if space.depth(k) < need:
            raise DepthError(f"block {k} needs fine depth >= {need} (absolute {k + need}), "
                             f"has {space.depth(k)}")
    vals = []
    for atom in space.atoms:
        a, b = space.cell_interval(atom)
        vals.append(Fraction(rademacher_sign(atom[0], net.index(atom[0]), (a + b) / 2)))
    return RandomVariable(space.fine, tuple(vals), None)


# ---------------------------------------------------------------------------
# batteries


def step_battery(space: DyadicBlockSpace, count: int, depth: int, seed: int = 0) -> list[DualVector]:
    """Seeded dyadic step test vectors of absolute depth at most ``depth``.

    On block k the vector is constant on cells of length ``2**-depth`` (a
    single value when ``k >= depth``).  The first member is the constant 1.
    """
    if count < 1:
        raise InvalidBattery("battery must be non-empty")
    rng = random.Random(seed)
    out = [DualVector(BlockElement(space, (WalshSeries.constant(1),) * space.blocks,
                                   WalshSeries.constant(1)), None, "one")]
    while len(out) < count:
        blocks = []
        for k in range(1, space.blocks + 1):
            rel = max(depth - k, 0)
            cells = [Fraction(rng.randint(-16, 16), rng.randint(1, 8)) for _ in range(2**rel)]
            blocks.append(WalshSeries.from_cells(cells))
        tail = WalshSeries.constant(Fraction(rng.randint(-16, 16), 4))
        out.append(DualVector(BlockElement(space, tuple(blocks), tail), None, f"step{len(out)}"))
    return out


def linear_test_vector(space: DyadicBlockSpace, rel_depth: int):
    """Cell-average approximation of ``Y(t) = t`` and its exact squared error.

    On block k the cells have length ``w = 2**-(k + rel_depth)``, and a linear
    function differs from its cell average by a centred uniform of width
    ``w``, so ``||Y - Y_d | F||_2**2 = w**2 / 12`` on every block.
    """
    blocks = []
    errs = []
    for k in range(1, space.blocks + 1):
        w = Fraction(1, 2 ** (k + rel_depth))
        a = Fraction(1, 2**k)
        cells = [a + (j + Fraction(1, 2)) * w for j in range(2**rel_depth)]
        blocks.append(WalshSeries.from_cells(cells))
        errs.append(w * w / 12)
    Y = BlockElement(space, tuple(blocks), None)
    return DualVector(Y, None, f"t@{rel_depth}"), RandomVariable(space.coarse, tuple(errs))


# ---------------------------------------------------------------------------
# weak convergence


def weak_convergence_check(members: Callable[[int], Element], limit: Element, battery: Sequence[DualVector],
                           schedule: Sequence[int], rademacher: bool = True) -> Findings:
    """Pair ``X_N - limit`` with every battery vector along the schedule.

    For the Rademacher net (``members(N)`` has ``n_k = N`` on every block) the
    exact-vanishing law is certified: the pairing on block k is exactly 0
    whenever ``k + N + 1 > d(Y)``.  The verdict asks every pairing to be
    exactly 0 on every realised block at the end of the schedule.
    """
    if not battery:
        raise InvalidBattery("battery must be non-empty")
    checks = []
    table = []
    law_ok = True
    final_ok = True
    for D in battery:
        d = D.depth()
        rows = []
        for N in schedule:
            v = pairing(members(N) - limit, D)
            rows.append({"N": N, "pairing": v})
            if rademacher:
                for k, val in enumerate(v.values, start=1):
                    if k + N + 1 > d and val != 0:
                        law_ok = False
        last = rows[-1]["pairing"]
        zero_from = None
        for r in reversed(rows):
            if any(x != 0 for x in r["pairing"].values):
                break
            zero_from = r["N"]
        if zero_from is None:
            final_ok = False
        table.append({"vector": D.name, "depth": d, "zero_from_N": zero_from, "rows": rows,
                      "final": last})
    if rademacher:
        checks.append(Check("exact-vanishing-law", PASS if law_ok else FAIL,
                            {"rule": "pairing == 0 on A_k whenever k + N + 1 > depth(Y)"}))
    status = PASS if final_ok else FAIL
    if status == PASS and isinstance(limit, BlockElement) and limit.space.lazy:
        status = PREFIX_ONLY
    checks.append(Check("weakly-convergent", status,
                        {"scope": "battery and schedule on realised blocks", "schedule": list(schedule),
                         "battery_size": len(battery), "table": table}))
    return Findings("weak convergence", checks)


def cauchy_schwarz_holds(X: Element, D: DualVector) -> bool:
    """``|<X, Y>|**2 <= ||X|F||**2 ||Y|F||**2`` cellwise."""
    p = pairing(X, D)
    a = conditional_l2_norm_sq(X, D.F)
    b = conditional_l2_norm_sq(D.Y, D.F)
    return all(x * x <= u * w for x, u, w in zip(p.values, a.values, b.values))
