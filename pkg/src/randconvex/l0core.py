"""Atomic probability spaces and exact-rational random variables.

Everything here is immutable.  Scalars are :class:`fractions.Fraction`;
``math.inf`` / ``-math.inf`` are admitted only as values of *extended*
random variables and only take part in comparisons.

Two kinds of space are supported:

* :class:`FiniteAtomicSpace` -- a handful of atoms with rational masses.
* :class:`DyadicBlockSpace` -- ``(0, 1)`` cut into the blocks
  ``A_n = [2**-n, 2**-(n-1))``.  The first ``m`` blocks are materialised
  (each split into ``2**d_n`` equal fine cells); blocks ``n > m`` live in a
  lazy tail whose values are described by a :class:`TailRule`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

INF = math.inf

EXACT = "exact"
PREFIX_ONLY = "prefix-only"


class L0Error(Exception):
    """Base class for errors raised by the workbench."""


class InvalidParameter(L0Error, ValueError):
    pass


class IncompatibleOperands(L0Error, ValueError):
    pass


class EmptyFamily(L0Error, ValueError):
    pass


class OracleViolation(L0Error):
    pass


class ExtendedArithmeticError(L0Error, ArithmeticError):
    """Arithmetic attempted on a value that is +/- infinity."""


def rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused (other than through ``Fraction`` explicitly) so that no
    binary rounding sneaks into the exact core.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidParameter("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise InvalidParameter(f"not an exact rational: {x!r}")


def extended(x):
    if isinstance(x, float) and math.isinf(x):
        return x
    return rational(x)


def is_infinite(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def fmt(x) -> str:
    """Exact text form used in reports: ``"p/q"``, ``"inf"`` or ``"-inf"``."""
    if is_infinite(x):
        return "inf" if x > 0 else "-inf"
    x = rational(x)
    return f"{x.numerator}/{x.denominator}"


def parse(s: str):
    s = s.strip()
    if s in ("inf", "+inf"):
        return INF
    if s == "-inf":
        return -INF
    return Fraction(s)


@dataclass(frozen=True)
class Verdict:
    """A boolean decision together with the scope it was verified on."""

    value: bool
    scope: str = EXACT

    def __bool__(self) -> bool:
        return self.value

    def __and__(self, other: "Verdict") -> "Verdict":
        scope = EXACT if self.scope == EXACT and other.scope == EXACT else PREFIX_ONLY
        return Verdict(self.value and other.value, scope)


# ---------------------------------------------------------------------------
# tail rules


@dataclass(frozen=True)
class TailRule:
    """Block values ``sum_r coef_r * r**n`` for blocks ``n > m``.

    The constant rule is ``{1: c}``; ``eps = 2**-n`` is ``{1/2: 1}``.  The
    family is closed under sums and products, and the sign of a rule with at
    most two terms can be decided exactly over the whole tail.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]  # sorted (ratio, coef), coef != 0

    @classmethod
    def constant(cls, c) -> "TailRule":
        c = rational(c)
        return cls(((Fraction(1), c),) if c else ())

    @classmethod
    def geometric(cls, coef, ratio) -> "TailRule":
        coef, ratio = rational(coef), rational(ratio)
        if ratio <= 0:
            raise InvalidParameter("tail ratio must be positive")
        return cls(((ratio, coef),) if coef else ())

    @classmethod
    def _from(cls, d: dict) -> "TailRule":
        return cls(tuple(sorted((r, c) for r, c in d.items() if c != 0)))

    def value(self, n: int) -> Fraction:
        return sum((c * r**n for r, c in self.terms), Fraction(0))

    @property
    def is_constant(self) -> bool:
        return all(r == 1 for r, _ in self.terms)

    @property
    def limit_constant(self) -> Fraction | None:
        if self.is_constant:
            return self.value(0)
        return None

    def __add__(self, other: "TailRule") -> "TailRule":
        d = dict(self.terms)
        for r, c in other.terms:
            d[r] = d.get(r, Fraction(0)) + c
        return TailRule._from(d)

    def __neg__(self) -> "TailRule":
        return TailRule(tuple((r, -c) for r, c in self.terms))

    def __sub__(self, other: "TailRule") -> "TailRule":
        return self + (-other)

    def __mul__(self, other: "TailRule") -> "TailRule":
        d: dict = {}
        for r1, c1 in self.terms:
            for r2, c2 in other.terms:
                d[r1 * r2] = d.get(r1 * r2, Fraction(0)) + c1 * c2
        return TailRule._from(d)

    def reciprocal(self) -> "TailRule | None":
        if len(self.terms) != 1:
            return None
        r, c = self.terms[0]
        return TailRule(((1 / r, 1 / c),))

    def absolute(self) -> "TailRule | None":
        if len(self.terms) <= 1:
            return TailRule(tuple((r, abs(c)) for r, c in self.terms))
        return None

    def sign_decision(self, start: int, strict: bool) -> bool | None:
        """Decide ``value(n) >= 0`` (or ``> 0``) for every ``n >= start``.

        Returns None when the rule has more than two terms.
        """
        t = self.terms
        if not t:
            return not strict
        if len(t) == 1:
            return t[0][1] > 0
        if len(t) > 2:
            return None
        (r1, c1), (r2, c2) = t  # r1 < r2
        # value(n) = r1**n * (c1 + c2 * q**n) with q = r2/r1 > 1
        if c2 < 0:
            return False
        g = c1 + c2 * (r2 / r1) ** start
        return g > 0 if strict else g >= 0

    def to_dict(self) -> list:
        return [{"ratio": fmt(r), "coef": fmt(c)} for r, c in self.terms]

    @classmethod
    def from_dict(cls, data: list) -> "TailRule":
        return cls._from({Fraction(t["ratio"]): Fraction(t["coef"]) for t in data})


ZERO_TAIL = TailRule.constant(0)


# ---------------------------------------------------------------------------
# spaces


class _AtomicBase:
    atoms: tuple
    prob: tuple

    @property
    def tail_mass(self) -> Fraction:
        return Fraction(0)

    @property
    def lazy(self) -> bool:
        return self.tail_mass > 0

    @cached_property
    def _index(self) -> dict:
        return {a: i for i, a in enumerate(self.atoms)}

    def atom_index(self, atom: Hashable) -> int:
        return self._index[atom]


@dataclass(frozen=True, eq=True)
class FiniteAtomicSpace(_AtomicBase):
    atoms: tuple
    prob: tuple

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "prob", tuple(rational(p) for p in self.prob))
        if len(self.atoms) != len(self.prob) or not self.atoms:
            raise InvalidParameter("need one probability per atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise InvalidParameter("duplicate atom identifiers")
        if any(p <= 0 for p in self.prob):
            raise InvalidParameter("atom probabilities must be positive")
        if sum(self.prob) != 1:
            raise InvalidParameter(f"probabilities sum to {sum(self.prob)}, not 1")

    @classmethod
    def uniform(cls, n: int) -> "FiniteAtomicSpace":
        return cls(tuple(range(n)), (Fraction(1, n),) * n)

    @cached_property
    def fine(self) -> "SigmaAlgebra":
        return SigmaAlgebra(self, tuple((i,) for i in range(len(self.atoms))), self.atoms, "fine")

    @cached_property
    def trivial(self) -> "SigmaAlgebra":
        return SigmaAlgebra(self, (tuple(range(len(self.atoms))),), ("omega",), "trivial")

    def algebra(self, groups: Sequence[Sequence[Hashable]], name: str = "") -> "SigmaAlgebra":
        cells = tuple(tuple(sorted(self.atom_index(a) for a in g)) for g in groups)
        return SigmaAlgebra(self, cells, tuple(range(len(cells))), name)


@dataclass(frozen=True, eq=True)
class DyadicBlockSpace(_AtomicBase):
    """``(0,1)`` with realised blocks ``A_1..A_m`` split into dyadic fine cells.

    Fine atom ``(n, j)`` is ``[2**-n + j * 2**-(n+d_n), 2**-n + (j+1) * 2**-(n+d_n))``.
    """

    blocks: int
    depths: tuple
    tail: TailRule = ZERO_TAIL

    def __post_init__(self):
        object.__setattr__(self, "depths", tuple(int(d) for d in self.depths))
        if self.blocks < 1:
            raise InvalidParameter("need at least one realised block")
        if len(self.depths) != self.blocks:
            raise InvalidParameter("one depth per realised block")
        if any(d < 0 for d in self.depths):
            raise InvalidParameter("fine depths must be non-negative")

    @cached_property
    def atoms(self) -> tuple:
        return tuple((n, j) for n in range(1, self.blocks + 1) for j in range(2 ** self.depths[n - 1]))

    @cached_property
    def prob(self) -> tuple:
        return tuple(Fraction(1, 2 ** (n + self.depths[n - 1])) for n, _ in self.atoms)

    @property
    def tail_mass(self) -> Fraction:
        return Fraction(1, 2**self.blocks)

    def block_prob(self, n: int) -> Fraction:
        return Fraction(1, 2**n)

    def depth(self, n: int) -> int:
        return self.depths[n - 1]

    def cell_interval(self, atom) -> tuple[Fraction, Fraction]:
        n, j = atom
        w = Fraction(1, 2 ** (n + self.depths[n - 1]))
        a = Fraction(1, 2**n) + j * w
        return a, a + w

    def block_atoms(self, n: int) -> tuple[int, ...]:
        start = sum(2**d for d in self.depths[: n - 1])
        return tuple(range(start, start + 2 ** self.depths[n - 1]))

    @cached_property
    def fine(self) -> "SigmaAlgebra":
        return SigmaAlgebra(self, tuple((i,) for i in range(len(self.atoms))), self.atoms, "E")

    @cached_property
    def coarse(self) -> "SigmaAlgebra":
        cells = tuple(self.block_atoms(n) for n in range(1, self.blocks + 1))
        return SigmaAlgebra(self, cells, tuple(range(1, self.blocks + 1)), "F")


def build_dyadic_space(m: int, depths: Sequence[int], tail: TailRule = ZERO_TAIL) -> DyadicBlockSpace:
    if m < 1:
        raise InvalidParameter("block count must be >= 1")
    depths = list(depths)
    if len(depths) == 1 and m > 1:
        depths = depths * m
    if any(d <= 0 for d in depths):
        raise InvalidParameter("depths must be positive")
    return DyadicBlockSpace(m, tuple(depths), tail)


Space = FiniteAtomicSpace | DyadicBlockSpace


@dataclass(frozen=True, eq=True)
class SigmaAlgebra:
    """A partition of the realised atoms into measurable cells.

    On lazy spaces the tail beyond the last realised block is implicitly cut
    along the blocks ``A_n`` (both the fine and the coarse algebra agree on the
    tail, where values are block-constant tail rules).
    """

    space: Space
    cells: tuple
    labels: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        seen = [c for cell in self.cells for c in cell]
        if sorted(seen) != list(range(len(self.space.atoms))):
            raise InvalidParameter("cells must partition the atoms")
        if any(not c for c in self.cells):
            raise InvalidParameter("empty cell")

    def __len__(self) -> int:
        return len(self.cells)

    @cached_property
    def cell_probs(self) -> tuple:
        p = self.space.prob
        return tuple(sum((p[a] for a in cell), Fraction(0)) for cell in self.cells)

    @cached_property
    def _cell_of(self) -> tuple:
        out = [0] * len(self.space.atoms)
        for i, cell in enumerate(self.cells):
            for a in cell:
                out[a] = i
        return tuple(out)

    def cell_of_atom(self, atom_idx: int) -> int:
        return self._cell_of[atom_idx]

    def total_probability(self) -> Fraction:
        return sum(self.cell_probs, Fraction(0)) + self.space.tail_mass

    def coarsens(self, other: "SigmaAlgebra") -> bool:
        """True when every cell of ``self`` is a union of cells of ``other``."""
        if self.space != other.space:
            return False
        return all(len({self._cell_of[a] for a in cell}) == 1 for cell in other.cells)

    def cell_index(self, label) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class EventSet:
    """A union of algebra cells, optionally together with the whole lazy tail."""

    algebra: SigmaAlgebra
    cells: frozenset
    tail: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cells", frozenset(self.cells))
        if self.tail and not self.algebra.space.lazy:
            raise InvalidParameter("no tail on a finite space")

    @property
    def measure(self) -> Fraction:
        m = sum((self.algebra.cell_probs[i] for i in self.cells), Fraction(0))
        return m + (self.algebra.space.tail_mass if self.tail else 0)

    @property
    def positive(self) -> bool:
        return self.measure > 0

    def complement(self) -> "EventSet":
        rest = frozenset(range(len(self.algebra))) - self.cells
        return EventSet(self.algebra, rest, self.algebra.space.lazy and not self.tail)

    def indicator(self) -> "RandomVariable":
        vals = tuple(Fraction(1 if i in self.cells else 0) for i in range(len(self.algebra)))
        tail = None
        if self.algebra.space.lazy:
            tail = TailRule.constant(1 if self.tail else 0)
        return RandomVariable(self.algebra, vals, tail)

    def disjoint(self, other: "EventSet") -> bool:
        return not (self.cells & other.cells) and not (self.tail and other.tail)


def whole(algebra: SigmaAlgebra) -> EventSet:
    return EventSet(algebra, frozenset(range(len(algebra))), algebra.space.lazy)


@dataclass(frozen=True)
class CountablePartition:
    """Disjoint events covering the space; ``remainder`` collects the rest."""

    events: tuple
    remainder: EventSet

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        evs = list(self.events) + [self.remainder]
        alg = evs[0].algebra
        if any(e.algebra != alg for e in evs):
            raise InvalidParameter("partition events on different algebras")
        for i in range(len(evs)):
            for j in range(i + 1, len(evs)):
                if not evs[i].disjoint(evs[j]):
                    raise InvalidParameter("partition events overlap")
        if sum((e.measure for e in evs), Fraction(0)) != 1:
            raise InvalidParameter("partition does not cover the space")

    @property
    def algebra(self) -> SigmaAlgebra:
        return self.remainder.algebra

    @classmethod
    def from_events(cls, events: Sequence[EventSet]) -> "CountablePartition":
        events = list(events)
        alg = events[0].algebra
        used = frozenset().union(*(e.cells for e in events))
        tail = any(e.tail for e in events)
        rest = EventSet(alg, frozenset(range(len(alg))) - used, alg.space.lazy and not tail)
        return cls(tuple(events), rest)


# ---------------------------------------------------------------------------
# random variables


def _common_algebra(a: SigmaAlgebra, b: SigmaAlgebra) -> SigmaAlgebra:
    if a == b:
        return a
    if a.space != b.space:
        raise IncompatibleOperands("random variables live on different spaces")
    if a.coarsens(b):
        return b
    if b.coarsens(a):
        return a
    raise IncompatibleOperands("neither algebra refines the other")


@dataclass(frozen=True)
class RandomVariable:
    """A step function constant on the cells of ``algebra``.

    ``tail`` gives the block values for ``n > m`` on lazy dyadic spaces; None
    there means "unknown beyond the realised prefix".
    """

    algebra: SigmaAlgebra
    values: tuple
    tail: TailRule | None = None

    def __post_init__(self):
        vals = tuple(extended(v) for v in self.values)
        if len(vals) != len(self.algebra):
            raise InvalidParameter(f"expected {len(self.algebra)} values, got {len(vals)}")
        object.__setattr__(self, "values", vals)
        if self.tail is not None and not self.space.lazy:
            object.__setattr__(self, "tail", None)

    # construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, algebra: SigmaAlgebra, c) -> "RandomVariable":
        c = extended(c)
        tail = None
        if algebra.space.lazy and not is_infinite(c):
            tail = TailRule.constant(c)
        return cls(algebra, (c,) * len(algebra), tail)

    @classmethod
    def from_function(cls, algebra: SigmaAlgebra, f: Callable, tail: TailRule | None = None):
        return cls(algebra, tuple(f(lab) for lab in algebra.labels), tail)

    @property
    def space(self) -> Space:
        return self.algebra.space

    @property
    def is_extended(self) -> bool:
        return any(is_infinite(v) for v in self.values)

    @property
    def scope(self) -> str:
        return PREFIX_ONLY if self.space.lazy and self.tail is None else EXACT

    def __getitem__(self, i: int):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def at(self, label):
        return self.values[self.algebra.cell_index(label)]

    def block_value(self, n: int):
        """Value on block ``n`` of a coarse (block-measurable) variable."""
        sp = self.space
        if isinstance(sp, DyadicBlockSpace) and n > sp.blocks:
            if self.tail is None:
                raise InvalidParameter("tail unknown")
            return self.tail.value(n)
        return self.values[self.algebra.cell_of_atom(sp.block_atoms(n)[0])]

    # sign classes ----------------------------------------------------------

    def _tail_sign(self, strict: bool) -> bool | None:
        if not self.space.lazy:
            return True
        if self.tail is None:
            return None
        return self.tail.sign_decision(self.space.blocks + 1, strict)

    @property
    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values) and self._tail_sign(False) is not False

    @property
    def is_strictly_positive(self) -> bool:
        return all(v > 0 for v in self.values) and self._tail_sign(True) is not False

    # structural --------------------------------------------------------------

    def lift(self, algebra: SigmaAlgebra) -> "RandomVariable":
        """Re-express on a finer algebra."""
        if algebra == self.algebra:
            return self
        if not self.algebra.coarsens(algebra):
            raise IncompatibleOperands("target algebra does not refine the source")
        vals = tuple(self.values[self.algebra.cell_of_atom(cell[0])] for cell in algebra.cells)
        return RandomVariable(algebra, vals, self.tail)

    def measurable(self, algebra: SigmaAlgebra) -> bool:
        """True when constant on every cell of ``algebra`` (a coarsening)."""
        if not algebra.coarsens(self.algebra):
            return False
        for cell in algebra.cells:
            vals = {self.values[self.algebra.cell_of_atom(a)] for a in cell}
            if len(vals) > 1:
                return False
        return True

    def project(self, algebra: SigmaAlgebra) -> "RandomVariable":
        """Re-express a measurable variable on the coarser ``algebra``."""
        if not self.measurable(algebra):
            raise IncompatibleOperands("variable is not measurable for the target algebra")
        vals = tuple(self.values[self.algebra.cell_of_atom(cell[0])] for cell in algebra.cells)
        return RandomVariable(algebra, vals, self.tail)

    def restrict(self, event: EventSet) -> "RandomVariable":
        """``1_A X`` for an event of a coarser (or equal) algebra."""
        return self * event.indicator()

    def to_dict(self) -> dict:
        d = {"algebra": self.algebra.name, "values": [fmt(v) for v in self.values]}
        if self.tail is not None:
            d["tail"] = self.tail.to_dict()
        return d

    # arithmetic --------------------------------------------------------------

    def _finite(self) -> None:
        if self.is_extended:
            raise ExtendedArithmeticError("arithmetic on an extended random variable")

    def _binary(self, other, op, tail_op) -> "RandomVariable":
        self._finite()
        if not isinstance(other, RandomVariable):
            other = RandomVariable.constant(self.algebra, rational(other))
        other._finite()
        alg = _common_algebra(self.algebra, other.algebra)
        a, b = self.lift(alg), other.lift(alg)
        vals = tuple(op(x, y) for x, y in zip(a.values, b.values))
        tail = None
        if a.tail is not None and b.tail is not None:
            tail = tail_op(a.tail, b.tail)
        return RandomVariable(alg, vals, tail)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y, lambda s, t: s + t)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y, lambda s, t: s - t)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y, lambda s, t: s * t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, RandomVariable):
            return self * (1 / rational(other))
        return self * other.reciprocal()

    def reciprocal(self) -> "RandomVariable":
        self._finite()
        if any(v == 0 for v in self.values):
            raise ZeroDivisionError("reciprocal of a variable with zero values")
        tail = self.tail.reciprocal() if self.tail is not None else None
        return RandomVariable(self.algebra, tuple(1 / v for v in self.values), tail)

    def __neg__(self):
        self._finite()
        tail = -self.tail if self.tail is not None else None
        return RandomVariable(self.algebra, tuple(-v for v in self.values), tail)

    def __abs__(self):
        self._finite()
        tail = self.tail.absolute() if self.tail is not None else None
        return RandomVariable(self.algebra, tuple(abs(v) for v in self.values), tail)

    def map(self, f: Callable, tail: TailRule | None = None) -> "RandomVariable":
        return RandomVariable(self.algebra, tuple(f(v) for v in self.values), tail)

    def same_values(self, other: "RandomVariable") -> bool:
        alg = _common_algebra(self.algebra, other.algebra)
        a, b = self.lift(alg), other.lift(alg)
        return a.values == b.values and (a.tail == b.tail or not self.space.lazy)


# ---------------------------------------------------------------------------
# order and lattice


def _pair(X: RandomVariable, Y: RandomVariable):
    if X.space != Y.space:
        raise IncompatibleOperands("random variables live on different spaces")
    alg = _common_algebra(X.algebra, Y.algebra)
    return X.lift(alg), Y.lift(alg), alg


def compare(X: RandomVariable, Y: RandomVariable, mode: str = "geq", on: EventSet | None = None) -> Verdict:
    """Almost-sure comparison ``X >= Y`` (``geq``) or ``X > Y`` (``gt``).

    With ``on`` the comparison is restricted to that event.  The tail of a
    lazy space is decided symbolically when both tail rules are known.
    """
    if mode not in ("geq", "gt"):
        raise InvalidParameter(f"unknown comparison mode {mode!r}")
    a, b, alg = _pair(X, Y)
    strict = mode == "gt"
    if on is not None:
        if not on.positive:
            raise InvalidParameter("comparison event must have positive measure")
        on_cells = {i for i in range(len(alg)) if on.algebra.cell_of_atom(alg.cells[i][0]) in on.cells}
        with_tail = on.tail
    else:
        on_cells = set(range(len(alg)))
        with_tail = alg.space.lazy
    for i in on_cells:
        x, y = a.values[i], b.values[i]
        if (x <= y) if strict else (x < y):
            return Verdict(False)
    if not with_tail:
        return Verdict(True)
    if a.tail is None or b.tail is None:
        return Verdict(True, PREFIX_ONLY)
    d = (a.tail - b.tail).sign_decision(alg.space.blocks + 1, strict)
    if d is None:
        return Verdict(True, PREFIX_ONLY)
    return Verdict(d)


def lattice(X: RandomVariable, Y: RandomVariable, mode: str = "meet") -> RandomVariable:
    """Cellwise min (``meet``) or max (``join``), glued along ``A = (X < Y)``."""
    if mode not in ("meet", "join"):
        raise InvalidParameter(f"unknown lattice mode {mode!r}")
    a, b, alg = _pair(X, Y)
    below = [x < y for x, y in zip(a.values, b.values)]
    if mode == "meet":
        vals = tuple(x if lt else y for x, y, lt in zip(a.values, b.values, below))
    else:
        vals = tuple(y if lt else x for x, y, lt in zip(a.values, b.values, below))
    return RandomVariable(alg, vals, _tail_extreme(a.tail, b.tail, alg, mode == "join"))


def _tail_extreme(s: TailRule | None, t: TailRule | None, alg: SigmaAlgebra, upper: bool):
    if not alg.space.lazy or s is None or t is None:
        return None
    start = alg.space.blocks + 1
    d = (s - t).sign_decision(start, False)
    if d:
        return s if upper else t
    d = (t - s).sign_decision(start, False)
    if d:
        return t if upper else s
    return None


@dataclass(frozen=True)
class CountableFamily:
    """A countable family ``n -> Y_n`` (n >= 1) with a dominating certificate.

    ``upper`` must dominate every member (for esssup) or ``lower`` be dominated
    by every member (for essinf); these are the caller's certificates.
    """

    term: Callable[[int], RandomVariable]
    upper: RandomVariable | None = None
    lower: RandomVariable | None = None
    max_terms: int = 1 << 16


@dataclass(frozen=True)
class SupBracket:
    lower: RandomVariable
    upper: RandomVariable
    terms_used: int
    scope: str = EXACT

    @property
    def exact(self) -> bool:
        return self.lower.same_values(self.upper)


def esssup(family, tol=None):
    """Essential supremum.

    A finite family returns its exact cellwise maximum.  A
    :class:`CountableFamily` returns a :class:`SupBracket` whose lower end is
    the running maximum of the enumerated members, stopping once it is within
    ``tol`` of the family's upper certificate on every cell.
    """
    return _ess(family, tol, upper=True)


def essinf(family, tol=None):
    return _ess(family, tol, upper=False)


def _ess(family, tol, upper: bool):
    mode = "join" if upper else "meet"
    if isinstance(family, CountableFamily):
        cert = family.upper if upper else family.lower
        if cert is None:
            raise InvalidParameter("countable family needs a bound certificate")
        if tol is None:
            raise InvalidParameter("countable family needs a tolerance")
        tol = rational(tol)
        best = family.term(1)
        for n in range(1, family.max_terms + 1):
            y = family.term(n)
            ok = compare(cert, y) if upper else compare(y, cert)
            if not ok:
                raise OracleViolation(f"member {n} violates the bound certificate")
            best = lattice(best, y, mode)
            gap = (cert - best) if upper else (best - cert)
            if all(g <= tol for g in gap.values):
                lo, hi = (best, cert) if upper else (cert, best)
                return SupBracket(lo, hi, n, best.scope)
        raise OracleViolation("tolerance not reached within max_terms")
    members = list(family)
    if not members:
        raise EmptyFamily("essential supremum of an empty family is undefined here")
    out = members[0]
    for y in members[1:]:
        out = lattice(out, y, mode)
    return out


def monotone_approximation(family, dominator: Callable, tol=None) -> list:
    """Increasing sequence of members whose last term reaches the esssup.

    ``dominator(Y, Y2)`` must return a member of the family dominating both.
    Finite families are walked exhaustively so the final term equals the
    esssup exactly; a :class:`CountableFamily` is walked until the running
    term is within ``tol`` of its upper certificate.
    """
    if isinstance(family, CountableFamily):
        if family.upper is None or tol is None:
            raise InvalidParameter("countable family needs upper certificate and tolerance")
        tol = rational(tol)
        seq = [family.term(1)]
        for n in range(2, family.max_terms + 1):
            seq.append(_dominate(dominator, seq[-1], family.term(n), None))
            if all(g <= tol for g in (family.upper - seq[-1]).values):
                return seq
        raise OracleViolation("tolerance not reached within max_terms")
    members = list(family)
    if not members:
        raise EmptyFamily("empty family")
    seq = [members[0]]
    for y in members[1:]:
        seq.append(_dominate(dominator, seq[-1], y, members))
    # one more sweep so that the result also dominates members met early
    for y in members:
        if not compare(seq[-1], y):
            seq.append(_dominate(dominator, seq[-1], y, members))
    return seq


def _dominate(dominator, cur, y, members):
    z = dominator(cur, y)
    if members is not None and not any(z.same_values(m) for m in members):
        raise OracleViolation("dominator returned a non-member")
    if not (compare(z, cur) and compare(z, y)):
        raise OracleViolation("dominator result does not dominate its inputs")
    return z


# ---------------------------------------------------------------------------
# serialisation


def space_to_dict(space: Space) -> dict:
    if isinstance(space, DyadicBlockSpace):
        return {"kind": "dyadic", "blocks": space.blocks, "depths": list(space.depths),
                "tail": space.tail.to_dict()}
    return {"kind": "finite", "atoms": [str(a) for a in space.atoms],
            "prob": [fmt(p) for p in space.prob]}


def space_from_dict(d: dict) -> Space:
    if d["kind"] == "dyadic":
        return DyadicBlockSpace(d["blocks"], tuple(d["depths"]), TailRule.from_dict(d.get("tail", [])))
    return FiniteAtomicSpace(tuple(d["atoms"]), tuple(Fraction(p) for p in d["prob"]))


def block_step_to_dict(X: RandomVariable) -> list:
    """Fine-algebra variable on a dyadic space as ``{block, depth, cell_values}``."""
    sp = X.space
    if not isinstance(sp, DyadicBlockSpace):
        raise InvalidParameter("block step format needs a dyadic space")
    X = X.lift(sp.fine)
    return [{"block": n, "depth": sp.depth(n),
             "cell_values": [fmt(X.values[a]) for a in sp.block_atoms(n)]}
            for n in range(1, sp.blocks + 1)]


def block_step_from_dict(space: DyadicBlockSpace, data: list, tail: TailRule | None = None) -> RandomVariable:
    vals: list = [None] * len(space.atoms)
    for entry in data:
        n = entry["block"]
        if entry["depth"] != space.depth(n):
            raise InvalidParameter(f"block {n}: depth {entry['depth']} != space depth {space.depth(n)}")
        for a, v in zip(space.block_atoms(n), entry["cell_values"]):
            vals[a] = parse(v)
    if any(v is None for v in vals):
        raise InvalidParameter("missing block in block step data")
    return RandomVariable(space.fine, tuple(vals), tail)


def rv_from_dict(algebra: SigmaAlgebra, d: dict) -> RandomVariable:
    tail = TailRule.from_dict(d["tail"]) if "tail" in d else None
    return RandomVariable(algebra, tuple(parse(v) for v in d["values"]), tail)


def rv(algebra: SigmaAlgebra, *values, tail=None) -> RandomVariable:
    """Shorthand constructor: ``rv(F, 1, 2)``."""
    if len(values) == 1 and isinstance(values[0], (list, tuple)):
        values = tuple(values[0])
    if tail is not None and not isinstance(tail, TailRule):
        tail = TailRule.constant(tail)
    return RandomVariable(algebra, values, tail)


def iter_cells(algebra: SigmaAlgebra) -> Iterable[int]:
    return range(len(algebra))
