"""Countable concatenation: gluing, cc-closure membership, the rcc property,
and the epsilon-optimal selection from a concatenation-stable family."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .condnorm import Element, InvalidEpsilon
from .convexity import (
    AbsorbencyFailure,
    ExceptionalUnitBall,
    L0ConvexSet,
    NotLocal,
    cell_gauge_bracket,
)
from .elements import cell_vector, glue_cells, vector_is_zero
from .l0core import (
    EXACT,
    INF,
    PREFIX_ONLY,
    CountablePartition,
    EmptyFamily,
    EventSet,
    InvalidParameter,
    L0Error,
    RandomVariable,
    SigmaAlgebra,
    TailRule,
    Verdict,
    compare,
)


class InvalidPartition(InvalidParameter):
    pass


class ArityError(InvalidParameter):
    pass


class ContractViolation(L0Error):
    pass


class PrefixInsufficient(L0Error):
    def __init__(self, msg, uncovered=()):
        super().__init__(msg)
        self.uncovered = tuple(uncovered)


class PreconditionViolation(L0Error):
    pass


@dataclass(frozen=True)
class ConcatenationWitness:
    partition: CountablePartition
    members: tuple
    glued: Element | None = None
    scope: str = EXACT

    def verify(self) -> bool:
        """``1_{A_n} glued == 1_{A_n} member_n`` on every realised cell."""
        F = self.partition.algebra
        for ev, m in zip(self.partition.events, self.members):
            for i in ev.cells:
                if cell_vector(self.glued, F, i) != cell_vector(m, F, i):
                    return False
        return True

    def to_dict(self) -> dict:
        return {"partition": [sorted(F_lab(self.partition.algebra, e)) for e in self.partition.events],
                "tail_event": [e.tail for e in self.partition.events],
                "members": list(self.members), "scope": self.scope}


def F_lab(F: SigmaAlgebra, ev: EventSet) -> list:
    return [F.labels[i] for i in ev.cells]


def glue(partition: CountablePartition, elements: Sequence[Element]) -> Element:
    """The element equal to ``elements[n]`` on the n-th partition event.

    An extra trailing element, when given, fills the remainder event; it is
    required whenever the remainder has positive measure.
    """
    F = partition.algebra
    events = list(partition.events)
    if len(elements) == len(events) + 1:
        events.append(partition.remainder)
    elif len(elements) != len(events) or partition.remainder.positive:
        raise ArityError(f"{len(elements)} elements for {len(events)} events"
                         + (" and a non-null remainder" if partition.remainder.positive else ""))
    chosen: list = [None] * len(F)
    tail_from = None
    for ev, X in zip(events, elements):
        for i in ev.cells:
            chosen[i] = X
        if ev.tail:
            tail_from = X
    if any(c is None for c in chosen):
        raise InvalidPartition("partition does not cover every cell")
    return glue_cells(F, chosen, tail_from)


def partition_from_labels(F: SigmaAlgebra, assignment: Sequence[int], tail_index: int | None = None):
    """Group cells by assigned member index; returns (partition, member order)."""
    order = sorted(set(assignment) | ({tail_index} if tail_index is not None else set()))
    events = [EventSet(F, {i for i, a in enumerate(assignment) if a == k}, tail=(k == tail_index))
              for k in order]
    return CountablePartition.from_events(events), order


# ---------------------------------------------------------------------------
# cc-closure and rcc


def _generators(K) -> list:
    if isinstance(K, L0ConvexSet):
        return list(K.generators) if K.generators is not None else []
    return list(K)


def cc_closure_member(K, X: Element, F: SigmaAlgebra | None = None):
    """Is X a countable concatenation of members of K?

    Returns ``(Verdict, ConcatenationWitness | None)``.  On atomic F it is
    enough to glue along the cells themselves.
    """
    if isinstance(K, L0ConvexSet) and K.generators is None:
        if not K.local:
            raise NotLocal(f"{K!r}: membership is not cellwise-local")
        F = K.F
        ok = all(K.cell_member(i, cell_vector(X, F, i)) for i in range(len(F)))
        if not ok:
            return Verdict(False), None
        part = CountablePartition.from_events([EventSet(F, range(len(F)), F.space.lazy)])
        scope = PREFIX_ONLY if F.space.lazy and K.tail_member(X) is None else EXACT
        return Verdict(True, scope), ConcatenationWitness(part, (X,), X, scope)
    gens = _generators(K)
    if not gens:
        raise EmptyFamily("cc-closure of an empty set")
    F = F or (K.F if isinstance(K, L0ConvexSet) else _default_F(gens[0]))
    assignment = []
    for i in range(len(F)):
        v = cell_vector(X, F, i)
        hit = next((k for k, g in enumerate(gens) if cell_vector(g, F, i) == v), None)
        if hit is None:
            return Verdict(False), None
        assignment.append(hit)
    tail_index, scope = None, EXACT
    if F.space.lazy:
        tail_index = next((k for k, g in enumerate(gens) if _same_tail(g, X)), None)
        if tail_index is None:
            scope = PREFIX_ONLY
    part, order = partition_from_labels(F, assignment, tail_index)
    wit = ConcatenationWitness(part, tuple(gens[k] for k in order), X, scope)
    return Verdict(True, scope), wit


def _same_tail(a: Element, b: Element) -> bool:
    return a.tail is not None and a.tail == b.tail


def _default_F(X: Element) -> SigmaAlgebra:
    from .condnorm import default_F
    return default_F(X)


@dataclass(frozen=True)
class RccDecision:
    value: bool
    scope: str = EXACT
    counterwitness: object = None
    certificate: str = ""

    def __bool__(self) -> bool:
        return self.value

    def to_dict(self) -> dict:
        return {"value": self.value, "scope": self.scope, "counterwitness": self.counterwitness,
                "certificate": self.certificate}


def has_rcc(K, F: SigmaAlgebra | None = None) -> RccDecision:
    """Relative countable concatenation property.

    Finite generator sets are checked exhaustively over every cellwise
    assignment of generators.  Cellwise-local oracle sets have the property
    by construction (locality certificate).  Non-local oracle sets are
    rejected unless they supply their own counterwitness.
    """
    if isinstance(K, L0ConvexSet) and K.generators is None or isinstance(K, ExceptionalUnitBall):
        if K.local:
            return RccDecision(True, EXACT, None, "membership is decided cell by cell (locality)")
        if hasattr(K, "rcc_counterwitness"):
            return RccDecision(False, EXACT, K.rcc_counterwitness(), "explicit gluing leaves the set")
        raise NotLocal(f"{K!r}: cannot decide rcc for a non-local oracle set")
    gens = _generators(K)
    if not gens:
        raise EmptyFamily("rcc of an empty set")
    F = F or (K.F if isinstance(K, L0ConvexSet) else _default_F(gens[0]))
    member = (lambda Z: bool(K.contains(Z))) if isinstance(K, L0ConvexSet) else \
        (lambda Z: any(Z.same_values(g) for g in gens))
    for assignment in itertools.product(range(len(gens)), repeat=len(F)):
        glued = glue_cells(F, [gens[k] for k in assignment], gens[assignment[-1]])
        if not member(glued):
            return RccDecision(False, EXACT, {"assignment": list(assignment), "glued": glued},
                               "exhaustive gluing")
    scope = PREFIX_ONLY if F.space.lazy else EXACT
    return RccDecision(True, scope, None, f"exhaustive over {len(gens)}^{len(F)} gluings")


def cc_closure(gens: Sequence[Element], F: SigmaAlgebra) -> list:
    """All cellwise gluings of a finite generator list (deduplicated)."""
    out: list = []
    for assignment in itertools.product(range(len(gens)), repeat=len(F)):
        g = glue_cells(F, [gens[k] for k in assignment], gens[assignment[-1]])
        if not any(g.same_values(h) for h in out):
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# epsilon-optimal selection


@dataclass(frozen=True)
class Selection:
    value: RandomVariable
    partition: CountablePartition
    member_indices: tuple
    members: tuple
    sandwich: bool
    scope: str = EXACT

    def to_dict(self) -> dict:
        return {"value": self.value, "member_indices": list(self.member_indices),
                "partition": [F_lab(self.partition.algebra, e) for e in self.partition.events],
                "sandwich": self.sandwich, "scope": self.scope}


def eps_optimal_selection(enumerator: Callable[[int], RandomVariable], essinf_value: RandomVariable,
                          epsilon: RandomVariable, max_steps: int = 4096) -> Selection:
    """Glue a decreasing sequence into ``essinf <= Y_eps < essinf + eps``.

    ``A_k`` is the set where ``Y_k`` first drops below ``essinf + eps``; for a
    nonincreasing sequence these sets increase, so removing the union of the
    earlier ones is the same as removing only ``A_{k-1}``'s cumulative set.
    """
    if not epsilon.is_strictly_positive:
        raise InvalidEpsilon("epsilon must be strictly positive")
    target = essinf_value + epsilon
    alg = target.algebra
    n = len(alg)
    owner: list = [None] * n
    tail_owner = None
    lazy = alg.space.lazy
    members: dict = {}
    prev = None
    for k in range(1, max_steps + 1):
        Y = enumerator(k)
        Y = Y.lift(alg) if Y.algebra != alg else Y
        if prev is not None and not compare(prev, Y):
            raise ContractViolation(f"enumerator increases at step {k}")
        if not compare(Y, essinf_value):
            raise ContractViolation(f"member {k} lies below the claimed essinf")
        prev = Y
        hit = [i for i in range(n) if owner[i] is None and Y.values[i] < target.values[i]]
        for i in hit:
            owner[i] = k
        if lazy and tail_owner is None and Y.tail is not None and target.tail is not None:
            if (target.tail - Y.tail).sign_decision(alg.space.blocks + 1, True):
                tail_owner = k
        if hit or (tail_owner == k):
            members[k] = Y
        if all(o is not None for o in owner) and (not lazy or tail_owner is not None):
            break
    else:
        uncovered = [alg.labels[i] for i in range(n) if owner[i] is None]
        if lazy and tail_owner is None:
            uncovered.append("tail")
        raise PrefixInsufficient(f"cells {uncovered} not covered after {max_steps} steps", uncovered)
    order = sorted(members)
    events = [EventSet(alg, {i for i in range(n) if owner[i] == k}, tail=(tail_owner == k)) for k in order]
    part = CountablePartition.from_events(events)
    value = glue(part, [members[k] for k in order])
    sandwich = bool(compare(value, essinf_value)) and bool(compare(target, value, "gt"))
    return Selection(value, part, tuple(order), tuple(members[k] for k in order), sandwich)


def scaling_selection(K: L0ConvexSet, X: Element, epsilon: RandomVariable,
                      bound: int = 2**64) -> RandomVariable:
    """Strictly positive ``Y`` with ``X in Y K`` and ``p_K(X) <= Y < p_K(X) + eps``.

    Each F-cell is bisected until a failing scaling ``lo`` and a succeeding
    ``hi`` are closer than ``eps``; then ``hi - eps < lo <= p_K(X) <= hi``.
    """
    if not epsilon.is_strictly_positive:
        raise InvalidEpsilon("epsilon must be strictly positive")
    rcc = has_rcc(K)
    if not rcc:
        raise PreconditionViolation(f"{K!r} is not stable under countable concatenation")
    F = K.F
    eps = epsilon.lift(F) if epsilon.algebra != F else epsilon
    ys, bad = [], []
    for i in range(len(F)):
        v = cell_vector(X, F, i)
        e = eps.values[i]
        if vector_is_zero(v):
            ys.append(e / 2)
            continue
        lo, hi = cell_gauge_bracket(K, i, v, e / 2, bound)
        if hi == INF:
            bad.append(F.labels[i])
            ys.append(INF)
            continue
        ys.append(hi)
    if bad:
        raise AbsorbencyFailure(f"no absorbing scaling found on cells {bad}", None, bad)
    tail = TailRule.constant(1) if F.space.lazy else None
    Y = RandomVariable(F, tuple(ys), tail)
    if not K.contains(X * Y.reciprocal()):
        raise ContractViolation("selected scaling does not absorb X")
    return Y
