"""Sparse Walsh series for functions on a single dyadic block.

A block ``A_n`` is rescaled to ``u in [0, 1)``.  Level ``l >= 1`` carries the
Rademacher function ``r_l(u) = +1`` when the ``l``-th binary digit of ``u`` is
0 and ``-1`` otherwise; mask bit ``l - 1`` selects level ``l``.  A Walsh
function is a product of Rademachers, so multiplication is XOR on masks and
the block average of ``w_S`` is 1 for ``S = 0`` and 0 otherwise.  Any step
function on dyadic cells of depth ``d`` is exactly a series over levels
``1..d``, which is what makes arbitrarily high frequencies cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .l0core import InvalidParameter, rational


def _bit_reverse(x: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (x & 1)
        x >>= 1
    return out


def fwht(values: Sequence[Fraction]) -> list[Fraction]:
    """Unnormalised Walsh-Hadamard transform ``sum_j (-1)**popcount(s & j) v_j``."""
    a = list(values)
    h = 1
    n = len(a)
    if n & (n - 1):
        raise InvalidParameter("length must be a power of two")
    while h < n:
        for i in range(0, n, 2 * h):
            for j in range(i, i + h):
                x, y = a[j], a[j + h]
                a[j], a[j + h] = x + y, x - y
        h *= 2
    return a


@dataclass(frozen=True)
class WalshSeries:
    terms: tuple  # sorted ((mask, coef), ...), coef != 0

    @classmethod
    def of(cls, mapping: Mapping[int, object] | Iterable = ()) -> "WalshSeries":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        d: dict = {}
        for m, c in items:
            d[int(m)] = d.get(int(m), Fraction(0)) + rational(c)
        return cls(tuple(sorted((m, c) for m, c in d.items() if c != 0)))

    @classmethod
    def constant(cls, c) -> "WalshSeries":
        return cls.of({0: c})

    @classmethod
    def rademacher(cls, level: int, coef=1) -> "WalshSeries":
        if level < 1:
            raise InvalidParameter("Rademacher levels start at 1")
        return cls.of({1 << (level - 1): coef})

    @classmethod
    def from_cells(cls, values: Sequence) -> "WalshSeries":
        """Exact coefficients of the step function with the given cell values."""
        n = len(values)
        depth = n.bit_length() - 1
        if n != 1 << depth:
            raise InvalidParameter("cell count must be a power of two")
        h = fwht([rational(v) for v in values])
        return cls.of({_bit_reverse(s, depth): h[s] / n for s in range(n)})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def coef(self, mask: int) -> Fraction:
        return self.as_dict().get(mask, Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_level(self) -> int:
        """Deepest Rademacher level present (0 for constants)."""
        return max((m.bit_length() for m, _ in self.terms), default=0)

    def mean(self) -> Fraction:
        return self.coef(0)

    def dot(self, other: "WalshSeries") -> Fraction:
        """Block average of the product (Parseval)."""
        b = other.as_dict()
        return sum((c * b[m] for m, c in self.terms if m in b), Fraction(0))

    def norm_sq(self) -> Fraction:
        return sum((c * c for _, c in self.terms), Fraction(0))

    def __add__(self, other: "WalshSeries") -> "WalshSeries":
        return WalshSeries.of(list(self.terms) + list(other.terms))

    def __neg__(self) -> "WalshSeries":
        return WalshSeries(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "WalshSeries") -> "WalshSeries":
        return self + (-other)

    def scale(self, s) -> "WalshSeries":
        s = rational(s)
        if s == 0:
            return WalshSeries(())
        return WalshSeries(tuple((m, c * s) for m, c in self.terms))

    def __mul__(self, other: "WalshSeries") -> "WalshSeries":
        return WalshSeries.of([(m1 ^ m2, c1 * c2) for m1, c1 in self.terms for m2, c2 in other.terms])

    def to_cells(self, depth: int) -> list[Fraction]:
        """Cell values at relative depth ``depth`` (must cover ``max_level``)."""
        if depth < self.max_level:
            raise InvalidParameter(f"depth {depth} below series level {self.max_level}")
        n = 1 << depth
        spectrum = [Fraction(0)] * n
        for m, c in self.terms:
            spectrum[_bit_reverse(m, depth)] = c
        return fwht(spectrum)

    def value_at(self, u: Fraction) -> Fraction:
        """Point value at ``u in [0,1)``, cells taken half-open on the right."""
        out = Fraction(0)
        for m, c in self.terms:
            sign = 1
            level = 1
            mm = m
            while mm:
                if mm & 1 and int(u * 2**level) & 1:
                    sign = -sign
                mm >>= 1
                level += 1
            out += sign * c
        return out
