"""Conditional expectation, the conditional L2 norm and L0-seminorm checks.

Module elements come in two flavours:

* a :class:`~randconvex.l0core.RandomVariable` on the fine algebra of a space,
  conditioned on a coarser algebra ``F``;
* a :class:`BlockElement` on a dyadic space, one Walsh series per block, for
  which ``F`` is always the block algebra.  This is the concrete form of the
  module ``L0(F) L2(E)`` used by the Rademacher counterexample.

Squared norms are carried exactly; square roots only show up as display
decimals.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .l0core import (
    DyadicBlockSpace,
    EventSet,
    IncompatibleOperands,
    InvalidParameter,
    RandomVariable,
    SigmaAlgebra,
    TailRule,
    compare,
    rational,
)
from .report import FAIL, PASS, Check, Findings
from .walsh import WalshSeries


class InvalidEpsilon(InvalidParameter):
    pass


@dataclass(frozen=True)
class BlockElement:
    """``sum_n X_n 1_{A_n}`` with each ``X_n`` a Walsh series on block ``n``.

    ``tail`` is a single series repeated on every block ``n > m``; None means
    the element is unknown beyond the realised prefix.
    """

    space: DyadicBlockSpace
    blocks: tuple
    tail: WalshSeries | None = WalshSeries(())

    def __post_init__(self):
        if len(self.blocks) != self.space.blocks:
            raise InvalidParameter("one Walsh series per realised block")

    @classmethod
    def zero(cls, space: DyadicBlockSpace) -> "BlockElement":
        return cls(space, (WalshSeries(()),) * space.blocks)

    @classmethod
    def from_rv(cls, X: RandomVariable) -> "BlockElement":
        sp = X.space
        if not isinstance(sp, DyadicBlockSpace):
            raise InvalidParameter("block elements need a dyadic space")
        X = X.lift(sp.fine)
        blocks = tuple(WalshSeries.from_cells([X.values[a] for a in sp.block_atoms(n)])
                       for n in range(1, sp.blocks + 1))
        tail = None
        if X.tail is not None and X.tail.is_constant:
            tail = WalshSeries.constant(X.tail.value(0))
        return cls(sp, blocks, tail)

    def to_rv(self) -> RandomVariable:
        """Materialise on the fine algebra (needs enough fine depth)."""
        sp = self.space
        vals: list = []
        for n, s in enumerate(self.blocks, start=1):
            vals.extend(s.to_cells(sp.depth(n)))
        tail = None
        if self.tail is not None and self.tail.max_level == 0:
            tail = TailRule.constant(self.tail.mean())
        return RandomVariable(sp.fine, tuple(vals), tail)

    @property
    def F(self) -> SigmaAlgebra:
        return self.space.coarse

    def depth(self) -> int:
        """Absolute dyadic depth: cells of length ``2**-depth`` resolve it."""
        return max((n + s.max_level for n, s in enumerate(self.blocks, start=1) if not s.is_zero),
                   default=0)

    def block(self, n: int) -> WalshSeries:
        if n > self.space.blocks:
            if self.tail is None:
                raise InvalidParameter("tail unknown")
            return self.tail
        return self.blocks[n - 1]

    def _check(self, other: "BlockElement"):
        if not isinstance(other, BlockElement) or other.space != self.space:
            raise IncompatibleOperands("block elements on different spaces")

    def __add__(self, other: "BlockElement") -> "BlockElement":
        self._check(other)
        tail = self.tail + other.tail if self.tail is not None and other.tail is not None else None
        return BlockElement(self.space, tuple(a + b for a, b in zip(self.blocks, other.blocks)), tail)

    def __neg__(self) -> "BlockElement":
        return BlockElement(self.space, tuple(-a for a in self.blocks),
                            -self.tail if self.tail is not None else None)

    def __sub__(self, other: "BlockElement") -> "BlockElement":
        return self + (-other)

    def __mul__(self, scalar) -> "BlockElement":
        """Multiply by a rational or an F-measurable random variable."""
        if isinstance(scalar, RandomVariable):
            Y = _as_block_scalar(scalar, self.space)
            blocks = tuple(s.scale(Y.values[n - 1]) for n, s in enumerate(self.blocks, start=1))
            tail = None
            if self.tail is not None and Y.tail is not None and Y.tail.is_constant:
                tail = self.tail.scale(Y.tail.value(0))
            elif self.tail is not None and self.tail.is_zero:
                tail = self.tail
            return BlockElement(self.space, blocks, tail)
        c = rational(scalar)
        return BlockElement(self.space, tuple(s.scale(c) for s in self.blocks),
                            self.tail.scale(c) if self.tail is not None else None)

    __rmul__ = __mul__

    def times(self, other: "BlockElement") -> "BlockElement":
        """Pointwise product of two elements."""
        self._check(other)
        tail = self.tail * other.tail if self.tail is not None and other.tail is not None else None
        return BlockElement(self.space, tuple(a * b for a, b in zip(self.blocks, other.blocks)), tail)

    def same_values(self, other: "BlockElement") -> bool:
        return self.blocks == other.blocks and self.tail == other.tail


def _as_block_scalar(Y: RandomVariable, space: DyadicBlockSpace) -> RandomVariable:
    if Y.space != space:
        raise IncompatibleOperands("scalar on a different space")
    return Y.project(space.coarse) if Y.algebra != space.coarse else Y


Element = RandomVariable | BlockElement


def default_F(X: Element) -> SigmaAlgebra:
    if isinstance(X, BlockElement):
        return X.F
    sp = X.space
    return sp.coarse if isinstance(sp, DyadicBlockSpace) else X.algebra


# ---------------------------------------------------------------------------
# conditional expectation and inner products


def conditional_expectation(X: Element, F: SigmaAlgebra | None = None) -> RandomVariable:
    """``E[X | F]`` cell by cell: ``sum_{c in A} X(c) P(c) / P(A)``."""
    if isinstance(X, BlockElement):
        if F is not None and F != X.F:
            raise IncompatibleOperands("block elements condition on the block algebra")
        tail = TailRule.constant(X.tail.mean()) if X.tail is not None else None
        return RandomVariable(X.F, tuple(s.mean() for s in X.blocks), tail)
    F = F if F is not None else default_F(X)
    if not F.coarsens(X.algebra):
        raise IncompatibleOperands("F is not a coarsening of the variable's algebra")
    X._finite()
    p = X.space.prob
    vals = []
    for cell, pc in zip(F.cells, F.cell_probs):
        vals.append(sum((X.values[X.algebra.cell_of_atom(a)] * p[a] for a in cell), Fraction(0)) / pc)
    return RandomVariable(F, tuple(vals), X.tail)


def conditional_inner(X: Element, Y: Element, F: SigmaAlgebra | None = None) -> RandomVariable:
    """``E[XY | F]``."""
    if isinstance(X, BlockElement) or isinstance(Y, BlockElement):
        if not isinstance(X, BlockElement):
            X = BlockElement.from_rv(X)
        if not isinstance(Y, BlockElement):
            Y = BlockElement.from_rv(Y)
        if F is not None and F != X.F:
            raise IncompatibleOperands("block elements condition on the block algebra")
        X._check(Y)
        tail = None
        if X.tail is not None and Y.tail is not None:
            tail = TailRule.constant(X.tail.dot(Y.tail))
        return RandomVariable(X.F, tuple(a.dot(b) for a, b in zip(X.blocks, Y.blocks)), tail)
    return conditional_expectation(X * Y, F)


def conditional_l2_norm_sq(X: Element, F: SigmaAlgebra | None = None) -> RandomVariable:
    """Squared conditional L2 norm, block by block.

    On dyadic spaces the block mass ``P(A_n) = 2**-n`` is used as the divisor
    directly; elsewhere the cell probability.  The Walsh form uses Parseval.
    """
    if isinstance(X, BlockElement):
        tail = TailRule.constant(X.tail.norm_sq()) if X.tail is not None else None
        return RandomVariable(X.F, tuple(s.norm_sq() for s in X.blocks), tail)
    F = F if F is not None else default_F(X)
    if not F.coarsens(X.algebra):
        raise IncompatibleOperands("F is not a coarsening of the variable's algebra")
    X._finite()
    sp = X.space
    p = sp.prob
    vals = []
    for i, cell in enumerate(F.cells):
        mass = sum((X.values[X.algebra.cell_of_atom(a)] ** 2 * p[a] for a in cell), Fraction(0))
        if isinstance(sp, DyadicBlockSpace) and F == sp.coarse:
            divisor = sp.block_prob(F.labels[i])
        else:
            divisor = F.cell_probs[i]
        vals.append(mass / divisor)
    tail = X.tail * X.tail if X.tail is not None else None
    return RandomVariable(F, tuple(vals), tail)


def display_sqrt(q: Fraction, digits: int = 12) -> str:
    """Decimal rendering of ``sqrt(q)``; display only, never compared."""
    from decimal import Decimal, getcontext

    getcontext().prec = digits + 5
    v = (Decimal(q.numerator) / Decimal(q.denominator)).sqrt()
    return f"{v:.{digits}f}"


def sqrt_bracket(q: Fraction, tol: Fraction = Fraction(1, 2**40)) -> tuple[Fraction, Fraction]:
    """Rationals ``lo <= sqrt(q) <= hi`` with ``hi - lo <= tol``."""
    q = rational(q)
    if q < 0:
        raise InvalidParameter("square root of a negative number")
    lo, hi = Fraction(0), max(Fraction(1), q)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid * mid <= q:
            lo = mid
        else:
            hi = mid
    return lo, hi


def exact_sqrt(q: Fraction) -> Fraction | None:
    """The rational square root of ``q`` when there is one."""
    q = Fraction(q)
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def squared_triangle_holds(s_sum: Fraction, s1: Fraction, s2: Fraction) -> bool:
    """``sqrt(s_sum) <= sqrt(s1) + sqrt(s2)`` decided on squares."""
    t = s_sum - s1 - s2
    return t <= 0 or t * t <= 4 * s1 * s2


def squared_sum_bound(total_sq: Fraction, parts_sq: Sequence[Fraction]) -> bool:
    """``sqrt(total_sq) <= sum(sqrt(parts_sq))`` with rational brackets.

    Exact for two parts; for more parts the square roots are bracketed tightly
    and the decision is only taken when the brackets separate.
    """
    parts_sq = list(parts_sq)
    if len(parts_sq) == 2:
        return squared_triangle_holds(total_sq, *parts_sq)
    roots = [exact_sqrt(p) for p in parts_sq]
    if all(r is not None for r in roots):
        total = sum(roots, Fraction(0))
        return total_sq <= total * total
    tol = Fraction(1, 2**60)
    his = sum((sqrt_bracket(p, tol)[1] for p in parts_sq), Fraction(0))
    los = sum((sqrt_bracket(p, tol)[0] for p in parts_sq), Fraction(0))
    if total_sq <= los * los:
        return True
    if total_sq > his * his:
        return False
    raise InvalidParameter("undecidable at the chosen precision")


# ---------------------------------------------------------------------------
# seminorms


@dataclass(frozen=True)
class ConditionalSeminorm:
    """An L0-seminorm given by its exact squared values."""

    name: str
    squared: Callable[[Element], RandomVariable]
    is_norm: bool = False

    def value_sq(self, X: Element) -> RandomVariable:
        return self.squared(X)


def conditional_l2(F: SigmaAlgebra | None = None) -> ConditionalSeminorm:
    return ConditionalSeminorm("||.|F||_2", lambda X: conditional_l2_norm_sq(X, F), True)


def abs_conditional_mean(F: SigmaAlgebra | None = None) -> ConditionalSeminorm:
    def sq(X):
        m = conditional_expectation(X, F)
        return m * m
    return ConditionalSeminorm("|E[.|F]|", sq, False)


def zero_seminorm(F: SigmaAlgebra) -> ConditionalSeminorm:
    return ConditionalSeminorm("zero", lambda X: RandomVariable.constant(F, 0), False)


def neighborhood_member(Q: Sequence[ConditionalSeminorm], epsilon: RandomVariable, X: Element) -> bool:
    """``X in U_{Q,eps}``: every seminorm in Q is ``<= eps`` cellwise."""
    if not Q:
        raise InvalidParameter("empty seminorm family")
    if not epsilon.is_strictly_positive:
        raise InvalidEpsilon("epsilon must be strictly positive")
    eps_sq = epsilon * epsilon
    for s in Q:
        if not compare(eps_sq, s.value_sq(X)):
            return False
    return True


# ---------------------------------------------------------------------------
# sampling


def random_rational(rng: random.Random, lo: int = -4, hi: int = 4, den: int = 8) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def sample_element(like: Element, rng: random.Random, max_level: int = 3) -> Element:
    """A random element of the same kind and space as ``like``."""
    if isinstance(like, BlockElement):
        blocks = tuple(
            WalshSeries.of({rng.randrange(1 << max_level): random_rational(rng) for _ in range(3)})
            for _ in like.blocks)
        tail = WalshSeries.constant(random_rational(rng)) if like.tail is not None else None
        return BlockElement(like.space, blocks, tail)
    tail = TailRule.constant(random_rational(rng)) if like.space.lazy else None
    return RandomVariable(like.algebra, tuple(random_rational(rng) for _ in like.values), tail)


def sample_scalar(F: SigmaAlgebra, rng: random.Random, lo: int = -3, hi: int = 3) -> RandomVariable:
    tail = TailRule.constant(random_rational(rng, lo, hi)) if F.space.lazy else None
    return RandomVariable(F, tuple(random_rational(rng, lo, hi) for _ in range(len(F))), tail)


def mean_zero_probes(like: Element, F: SigmaAlgebra) -> list:
    """Nonzero elements with ``E[X|F] = 0``: the natural definiteness probes."""
    if isinstance(like, BlockElement):
        out = []
        for n in range(1, like.space.blocks + 1):
            blocks = [WalshSeries(())] * like.space.blocks
            blocks[n - 1] = WalshSeries.rademacher(1)
            out.append(BlockElement(like.space, tuple(blocks)))
        return out
    alg = like.algebra
    p = like.space.prob
    out = []
    for cell in F.cells:
        atoms_cells = sorted({alg.cell_of_atom(a) for a in cell})
        if len(atoms_cells) < 2:
            continue
        c1, c2 = atoms_cells[:2]
        p1 = sum((p[a] for a in alg.cells[c1]), Fraction(0))
        p2 = sum((p[a] for a in alg.cells[c2]), Fraction(0))
        vals = [Fraction(0)] * len(alg)
        vals[c1], vals[c2] = p2, -p1
        tail = TailRule.constant(0) if like.space.lazy else None
        out.append(RandomVariable(alg, tuple(vals), tail))
    return out


def _zero_like(X: Element) -> Element:
    if isinstance(X, BlockElement):
        return BlockElement.zero(X.space)
    return X * 0


def _is_zero(X: Element) -> bool:
    if isinstance(X, BlockElement):
        return all(s.is_zero for s in X.blocks) and (X.tail is None or X.tail.is_zero)
    return all(v == 0 for v in X.values)


def seminorm_axioms_check(s: ConditionalSeminorm, like: Element, F: SigmaAlgebra, trials: int = 50,
                          seed: int = 0) -> Findings:
    """Sampled homogeneity, triangle inequality and definiteness.

    Homogeneity uses cellwise-varying L0 scalars of both signs and is compared
    on squares: ``s(YX)**2 == Y**2 s(X)**2``.  Triangle is decided exactly on
    squares.  Definiteness is probed with conditionally centred elements as
    well as random ones.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    rng = random.Random(seed)
    checks = []

    witness = None
    for _ in range(trials):
        X = sample_element(like, rng)
        Y = sample_scalar(F, rng)
        lhs = s.value_sq(X * Y)
        rhs = (Y * Y) * s.value_sq(X)
        if not lhs.same_values(rhs.lift(lhs.algebra) if rhs.algebra != lhs.algebra else rhs):
            witness = {"X": X, "Y": Y, "s(YX)^2": lhs, "Y^2 s(X)^2": rhs}
            break
    checks.append(Check("homogeneity", FAIL if witness else PASS, {"witness": witness, "seed": seed}))

    witness = None
    for _ in range(trials):
        X1, X2 = sample_element(like, rng), sample_element(like, rng)
        a, b, c = s.value_sq(X1 + X2), s.value_sq(X1), s.value_sq(X2)
        bad = [i for i in range(len(a.values)) if not squared_triangle_holds(a.values[i], b.values[i], c.values[i])]
        if bad:
            witness = {"X1": X1, "X2": X2, "cells": bad}
            break
    checks.append(Check("triangle", FAIL if witness else PASS, {"witness": witness, "seed": seed}))

    zero_ok = all(v == 0 for v in s.value_sq(_zero_like(like)).values)
    witness = None
    candidates = mean_zero_probes(like, F) + [sample_element(like, rng) for _ in range(trials)]
    for X in candidates:
        if _is_zero(X):
            continue
        v = s.value_sq(X)
        if all(x == 0 for x in v.values) and (v.tail is None or not v.tail.terms):
            witness = {"X": X}
            break
    status = PASS if (witness is None and zero_ok) else FAIL
    checks.append(Check("definiteness", status, {"witness": witness, "zero_maps_to_zero": zero_ok}))
    checks.append(Check("seminorm", PASS if all(c.status == PASS for c in checks[:2]) and zero_ok else FAIL, {}))
    return Findings(f"seminorm axioms: {s.name}", checks)


def indicator_restrict(X: Element, event: EventSet) -> Element:
    """``1_A X`` for an F-event."""
    return X * event.indicator()
