"""Cell-level views of module elements: restriction, scaling and gluing."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .condnorm import BlockElement, Element
from .l0core import IncompatibleOperands, RandomVariable, SigmaAlgebra, rational
from .walsh import WalshSeries


def cell_vector(X: Element, F: SigmaAlgebra, i: int):
    """Restriction of ``X`` to the ``i``-th F-cell.

    A tuple of values (one per atom of the cell) for random variables, the
    block's Walsh series for block elements.
    """
    if isinstance(X, BlockElement):
        return X.blocks[i]
    alg = X.algebra
    return tuple(X.values[alg.cell_of_atom(a)] for a in F.cells[i])


def scale_vector(v, s):
    s = rational(s)
    if isinstance(v, WalshSeries):
        return v.scale(s)
    return tuple(x * s for x in v)


def vector_is_zero(v) -> bool:
    if isinstance(v, WalshSeries):
        return v.is_zero
    return all(x == 0 for x in v)


def glue_cells(F: SigmaAlgebra, chosen: Sequence[Element], tail_from: Element | None = None) -> Element:
    """Element equal to ``chosen[i]`` on the ``i``-th F-cell.

    On lazy spaces the tail is copied from ``tail_from`` (None leaves it
    unknown).
    """
    if len(chosen) != len(F):
        raise IncompatibleOperands("one element per F-cell")
    first = chosen[0]
    if isinstance(first, BlockElement):
        if F != first.F:
            raise IncompatibleOperands("block elements glue along blocks")
        tail = tail_from.tail if tail_from is not None else None
        return BlockElement(first.space, tuple(c.blocks[i] for i, c in enumerate(chosen)), tail)
    alg = first.algebra
    for c in chosen:
        if c.algebra != alg:
            raise IncompatibleOperands("glued elements must share an algebra")
    if not F.coarsens(alg):
        raise IncompatibleOperands("F must coarsen the elements' algebra")
    vals = [None] * len(alg)
    for i, cell in enumerate(F.cells):
        for a in cell:
            k = alg.cell_of_atom(a)
            vals[k] = chosen[i].values[k]
    tail = tail_from.tail if tail_from is not None else None
    return RandomVariable(alg, tuple(vals), tail)


def combine(weights: Sequence[RandomVariable], elems: Sequence[Element]) -> Element:
    """``sum_i w_i X_i`` with F-measurable weights."""
    out = None
    for w, x in zip(weights, elems):
        term = x * w
        out = term if out is None else out + term
    return out


def zero_like(X: Element) -> Element:
    if isinstance(X, BlockElement):
        return BlockElement.zero(X.space)
    return X * 0


def cell_inner(u, v, F: SigmaAlgebra, i: int) -> Fraction:
    """``E[uv | cell]`` for two restrictions of the same F-cell.

    Tuple restrictions are indexed by the atoms of the cell, which is what
    :func:`cell_vector` produces.
    """
    if isinstance(u, WalshSeries):
        return u.dot(v)
    p = F.space.prob
    s = sum((x * y * p[a] for x, y, a in zip(u, v, F.cells[i])), Fraction(0))
    return s / F.cell_probs[i]


def from_cell_vectors(like: Element, F: SigmaAlgebra, vecs: Sequence) -> Element:
    """Inverse of :func:`cell_vector`: the element whose i-th restriction is ``vecs[i]``."""
    if isinstance(like, BlockElement):
        return BlockElement(like.space, tuple(vecs), None)
    alg = like.algebra
    vals: list = [Fraction(0)] * len(alg)
    for cell, v in zip(F.cells, vecs):
        for a, x in zip(cell, v):
            vals[alg.cell_of_atom(a)] = x
    return RandomVariable(alg, tuple(vals), None)


def lin(coeffs: Sequence, vecs: Sequence):
    """``sum c_i v_i`` for cell restrictions of one shape."""
    out = None
    for c, v in zip(coeffs, vecs):
        if c == 0:
            continue
        term = scale_vector(v, c)
        if out is None:
            out = term
        elif isinstance(term, WalshSeries):
            out = out + term
        else:
            out = tuple(x + y for x, y in zip(out, term))
    if out is None:
        out = scale_vector(vecs[0], 0)
    return out


def vsub(u, v):
    if isinstance(u, WalshSeries):
        return u - v
    return tuple(x - y for x, y in zip(u, v))


def unit_like(v):
    """The constant-one restriction of the same shape."""
    if isinstance(v, WalshSeries):
        return WalshSeries.constant(1)
    return tuple(Fraction(1) for _ in v)
