"""L0-convex sets, the gauge functional and the degenerate-gauge example.

Sets carry the algebra ``F`` whose random variables act as scalars.  A set is
*local* when membership is decided F-cell by F-cell; local sets are stable
under countable concatenation by construction, which is what lets the gauge
be computed one cell at a time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .condnorm import (
    BlockElement,
    Element,
    conditional_l2_norm_sq,
    sample_element,
    sqrt_bracket,
)
from .elements import cell_inner, cell_vector, scale_vector, vector_is_zero, zero_like
from .l0core import (
    EXACT,
    INF,
    PREFIX_ONLY,
    DyadicBlockSpace,
    InvalidParameter,
    L0Error,
    RandomVariable,
    SigmaAlgebra,
    TailRule,
    Verdict,
    compare,
    rational,
)
from .report import FAIL, NOT_APPLICABLE, PASS, Check, Findings

DEFAULT_TOL = Fraction(1, 2**20)
SEARCH_BOUND = 2**64


class AbsorbencyFailure(L0Error):
    def __init__(self, msg, gauge=None, cells=()):
        super().__init__(msg)
        self.gauge = gauge
        self.cells = tuple(cells)


class NotLocal(L0Error):
    """Membership is not cellwise-local, so the request cannot be decided."""


# ---------------------------------------------------------------------------
# sets


class L0ConvexSet:
    """A subset of the module described by a per-cell membership oracle.

    ``local_member(i, v)`` decides whether the restriction ``v`` of an element
    to the ``i``-th F-cell lies in the set's section over that cell.
    ``tail_member(X)`` (lazy spaces only) decides the tail blocks; when absent
    tail decisions are reported as prefix-only.
    """

    local = True

    def __init__(self, F: SigmaAlgebra, local_member: Callable | None = None, generators=None,
                 absorb_hint=None, name: str = "K", tail_member: Callable | None = None):
        self.F = F
        self._local_member = local_member
        self.generators = tuple(generators) if generators is not None else None
        self.absorb_hint = absorb_hint
        self.name = name
        self._tail_member = tail_member
        self.flags: dict = {}
        if self.generators is not None and self.local:
            for g in self.generators:
                if not all(self.cell_member(i, cell_vector(g, F, i)) for i in range(len(F))):
                    raise InvalidParameter("generator fails the local membership oracle")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"

    def cell_member(self, i: int, v) -> bool:
        return bool(self._local_member(i, v))

    def tail_member(self, X: Element) -> bool | None:
        if self._tail_member is None:
            return None
        return self._tail_member(X)

    def contains(self, X: Element) -> Verdict:
        for i in range(len(self.F)):
            if not self.cell_member(i, cell_vector(X, self.F, i)):
                return Verdict(False)
        if not self.F.space.lazy:
            return Verdict(True)
        t = self.tail_member(X)
        if t is None:
            return Verdict(True, PREFIX_ONLY)
        return Verdict(t)

    def closure_contains(self, X: Element) -> Verdict:
        """Membership in the topological closure (the set itself when closed)."""
        return self.contains(X)

    def interior_radius(self) -> RandomVariable | None:
        """Radius ``r`` (per F-cell) of a conditional-norm ball inside the set."""
        return None

    def exact_gauge(self, X: Element) -> RandomVariable | None:
        return None

    def mark(self, flag: str, value: bool) -> None:
        self.flags[flag] = value


class PolytopeSet(L0ConvexSet):
    """Per-cell rational polytope ``{v : a_j . v <= b_j}`` (``<`` when open).

    ``facets[i]`` lists ``(a, b)`` pairs for the i-th F-cell; ``a`` is indexed
    by the atoms of the cell.
    """

    def __init__(self, F: SigmaAlgebra, facets: Sequence, strict: bool = False, name: str = "polytope",
                 generators=None):
        self.facets = tuple(tuple((tuple(rational(x) for x in a), rational(b)) for a, b in cell)
                            for cell in facets)
        if len(self.facets) != len(F):
            raise InvalidParameter("one facet list per F-cell")
        self.strict = strict
        super().__init__(F, None, generators, name=name)

    def _ok(self, i, v, strict):
        for a, b in self.facets[i]:
            s = sum((x * y for x, y in zip(a, v)), Fraction(0))
            if (s >= b) if strict else (s > b):
                return False
        return True

    def cell_member(self, i, v):
        return self._ok(i, v, self.strict)

    def closure_contains(self, X):
        F = self.F
        return Verdict(all(self._ok(i, cell_vector(X, F, i), False) for i in range(len(F))))

    def exact_gauge(self, X):
        """``max(0, max_j a_j.v / b_j)`` per cell; needs every ``b_j > 0``."""
        if any(b <= 0 for cell in self.facets for _, b in cell):
            return None
        vals = []
        for i in range(len(self.F)):
            v = cell_vector(X, self.F, i)
            best = Fraction(0)
            for a, b in self.facets[i]:
                best = max(best, sum((x * y for x, y in zip(a, v)), Fraction(0)) / b)
            vals.append(best)
        return RandomVariable(self.F, tuple(vals))

    def interior_radius(self):
        """Largest rational ``r`` (bracketed) with the conditional ball inside."""
        F = self.F
        p = F.space.prob
        radii = []
        for i, cell in enumerate(F.cells):
            best = None
            for a, b in self.facets[i]:
                if b <= 0:
                    return None
                # a . v = E[v w | cell] with w(atom) = a(atom) P(cell) / P(atom)
                w = [x * F.cell_probs[i] / p[at] for x, at in zip(a, cell)]
                wn = cell_inner(w, w, F, i)
                if wn == 0:
                    continue
                r = b / sqrt_bracket(wn)[1]
                best = r if best is None else min(best, r)
            radii.append(best if best is not None else Fraction(1))
        return RandomVariable(F, tuple(radii))


def interval_box(F: SigmaAlgebra, lo, hi, strict: bool = False) -> PolytopeSet:
    """Per-atom interval ``[lo, hi]``; F must be the atom algebra."""
    facets = []
    for cell in F.cells:
        if len(cell) != 1:
            raise InvalidParameter("interval boxes need singleton cells")
        facets.append([((1,), rational(hi)), ((-1,), -rational(lo))])
    return PolytopeSet(F, facets, strict, name=f"box[{lo},{hi}]")


class NormBall(L0ConvexSet):
    """``{X : ||X|F||_2 <= r}`` with r an F-measurable radius."""

    def __init__(self, F: SigmaAlgebra, radius=1, name: str = "norm-ball"):
        if not isinstance(radius, RandomVariable):
            radius = RandomVariable.constant(F, rational(radius))
        self.radius = radius
        self._r2 = radius * radius
        super().__init__(F, None, name=name)

    def cell_member(self, i, v):
        return cell_inner(v, v, self.F, i) <= self._r2.values[i]

    def tail_member(self, X):
        if self._r2.tail is None:
            return None
        nsq = conditional_l2_norm_sq(X, self.F)
        if nsq.tail is None:
            return None
        return (self._r2.tail - nsq.tail).sign_decision(self.F.space.blocks + 1, False)

    def interior_radius(self):
        return self.radius


class FiniteSet(L0ConvexSet):
    """A finite list of elements; membership is equality with a generator."""

    local = False

    def __init__(self, F: SigmaAlgebra, generators: Sequence[Element], name: str = "finite"):
        if not generators:
            raise InvalidParameter("empty finite set")
        super().__init__(F, None, generators, name=name)

    def contains(self, X):
        return Verdict(any(X.same_values(g) for g in self.generators))

    def cell_member(self, i, v):
        return any(cell_vector(g, self.F, i) == v for g in self.generators)


class ExceptionalUnitBall(L0ConvexSet):
    """``{Y : |Y 1_{A_i}| <= 1 for all but finitely many blocks i}``.

    Lives on ``L0`` of a dyadic space with the fine algebra acting as scalars.
    Membership is decided symbolically from the tail rule; it is not local,
    and the set is not stable under countable concatenation.
    """

    local = False

    def __init__(self, space: DyadicBlockSpace, name: str = "U"):
        super().__init__(space.fine, None, name=name)
        self.space = space

    def exceptional_blocks(self, X: RandomVariable) -> list[int]:
        sp = self.space
        out = []
        for n in range(1, sp.blocks + 1):
            if any(abs(X.values[X.algebra.cell_of_atom(a)]) > 1 for a in sp.block_atoms(n)):
                out.append(n)
        return out

    def tail_eventually_bounded(self, X: RandomVariable) -> bool | None:
        """Whether ``|tail(n)| <= 1`` for all large n (None if undecidable)."""
        if X.tail is None:
            return None
        terms = X.tail.terms
        if not terms:
            return True
        r, c = terms[-1]
        if r < 1:
            return True
        if r > 1:
            return False
        if abs(c) != 1:
            return abs(c) < 1
        if len(terms) == 1:
            return True
        # |c + o(1)| <= 1 eventually iff the vanishing part has the right sign
        r2, c2 = terms[-2]
        return (c2 < 0) if c > 0 else (c2 > 0)

    def contains(self, X):
        t = self.tail_eventually_bounded(X)
        if t is None:
            return Verdict(True, PREFIX_ONLY)
        return Verdict(t)

    def cell_member(self, i, v):
        return True

    def interior_radius(self):
        # the unit ball of |.| (the conditional norm on the atom algebra) is inside
        return RandomVariable.constant(self.F, 1)

    def gauge_certificate(self, X: RandomVariable, delta) -> "DegenerateCertificate":
        return gauge_degenerate_scenario(X, [delta])

    def rcc_counterwitness(self) -> dict:
        """``X_n = 2 * 1_{A_n}`` are all in U; gluing them along ``{A_n}`` gives 2."""
        sp = self.space
        members = []
        for n in range(1, sp.blocks + 1):
            vals = tuple(Fraction(2) if lab[0] == n else Fraction(0) for lab in sp.fine.labels)
            Xn = RandomVariable(sp.fine, vals, TailRule.constant(0))
            assert self.contains(Xn)
            members.append(Xn)
        glued = RandomVariable.constant(sp.fine, 2)
        return {"members": members, "member_rule": "X_n = 2 on A_n, 0 elsewhere (all n, tail symbolic)",
                "partition": "{A_n : n >= 1}", "glued": glued,
                "glued_in_set": bool(self.contains(glued))}


# ---------------------------------------------------------------------------
# gauge


@dataclass(frozen=True)
class GaugeValue:
    lower: RandomVariable
    upper: RandomVariable
    exact: bool = False
    scope: str = EXACT
    open_above: tuple = ()

    def __post_init__(self):
        if any(a > b for a, b in zip(self.lower.values, self.upper.values)):
            raise InvalidParameter("gauge bracket with lower > upper")

    def contains(self, value: RandomVariable) -> bool:
        return all(lo <= v <= hi for lo, v, hi in zip(self.lower.values, value.values, self.upper.values))

    def intersects(self, other: "GaugeValue") -> bool:
        return all(max(a, c) <= min(b, d) for a, b, c, d in
                   zip(self.lower.values, self.upper.values, other.lower.values, other.upper.values))

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact, "scope": self.scope}


def _require_zero_member(K: L0ConvexSet, like: Element):
    z = zero_like(like)
    if not all(K.cell_member(i, cell_vector(z, K.F, i)) for i in range(len(K.F))):
        raise InvalidParameter("gauge needs 0 in K")


def _cell_scaled_member(K, i, v, y) -> bool:
    return K.cell_member(i, scale_vector(v, 1 / y))


def cell_gauge_bracket(K: L0ConvexSet, i: int, v, tol: Fraction, bound=SEARCH_BOUND):
    """Bisection ``lo < p <= hi`` (``hi - lo <= tol``) with ``v in hi K``.

    ``lo`` is a failing scaling (or 0); relies on ``v in yK => v in y'K`` for
    ``y' >= y``, valid for convex K containing 0.
    """
    if vector_is_zero(v):
        return Fraction(0), Fraction(0)
    hi = Fraction(1)
    if K.absorb_hint is not None:
        hi = max(hi, rational(K.absorb_hint[i]))
    lo = Fraction(0)
    while not _cell_scaled_member(K, i, v, hi):
        lo = hi
        hi *= 2
        if hi > bound:
            return lo, INF
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid > 0 and _cell_scaled_member(K, i, v, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def gauge(K: L0ConvexSet, X: Element, tol=DEFAULT_TOL) -> GaugeValue:
    """``p_K(X) = essinf{Y >= 0 : X in Y K}`` as a per-cell bracket.

    Exact for per-cell polytopes (facet ratios).  Otherwise bisection on each
    F-cell, which needs K local.  Raises :class:`AbsorbencyFailure` when some
    cell is not absorbed within the search bound.
    """
    tol = rational(tol)
    if isinstance(K, ExceptionalUnitBall):
        cert = gauge_degenerate_scenario(X, [tol])
        zero = RandomVariable.constant(K.F, 0)
        return GaugeValue(zero, RandomVariable.constant(K.F, tol), False,
                          EXACT if cert.scope == EXACT else PREFIX_ONLY)
    ex = K.exact_gauge(X)
    if ex is not None:
        return GaugeValue(ex, ex, True)
    if not K.local:
        raise NotLocal(f"{K!r} is not cellwise-local; use gauge_bruteforce")
    _require_zero_member(K, X)
    lows, highs, bad = [], [], []
    for i in range(len(K.F)):
        lo, hi = cell_gauge_bracket(K, i, cell_vector(X, K.F, i), tol)
        lows.append(lo)
        highs.append(hi)
        if hi == INF:
            bad.append(i)
    scope = PREFIX_ONLY if K.F.space.lazy else EXACT
    g = GaugeValue(RandomVariable(K.F, tuple(lows)), RandomVariable(K.F, tuple(highs)), False, scope)
    if bad:
        raise AbsorbencyFailure(f"cells {bad} not absorbed", g, bad)
    return g


def gauge_bruteforce(K: L0ConvexSet, X: Element, grid: Sequence) -> GaugeValue:
    """Sweep a finite grid of scalings and keep the tightest bracket per cell.

    For non-local sets the scalings are constants applied to the whole
    element; for local sets each cell is swept separately.
    """
    grid = sorted({rational(g) for g in grid})
    if not grid or grid[0] <= 0:
        raise InvalidParameter("grid must be non-empty and strictly positive")
    n = len(K.F)
    if not K.local:
        ok = [g for g in grid if K.contains(X * (1 / g) if not isinstance(X, BlockElement) else X * (1 / g))]
        up = ok[0] if ok else INF
        lo = max((g for g in grid if g < up), default=Fraction(0))
        open_above = tuple(range(n)) if not ok else ()
        return GaugeValue(RandomVariable.constant(K.F, lo), RandomVariable.constant(K.F, up), False,
                          open_above=open_above)
    lows, highs, open_above = [], [], []
    for i in range(n):
        v = cell_vector(X, K.F, i)
        if vector_is_zero(v):
            lows.append(Fraction(0))
            highs.append(grid[0])
            continue
        succ = [g for g in grid if _cell_scaled_member(K, i, v, g)]
        if not succ:
            lows.append(grid[-1])
            highs.append(INF)
            open_above.append(i)
            continue
        up = succ[0]
        highs.append(up)
        lows.append(max((g for g in grid if g < up), default=Fraction(0)))
    return GaugeValue(RandomVariable(K.F, tuple(lows)), RandomVariable(K.F, tuple(highs)), False,
                      open_above=tuple(open_above))


# ---------------------------------------------------------------------------
# axiom checks


def _scalar(F, rng, lo, hi, den=8):
    vals = tuple(Fraction(rng.randint(lo * den, hi * den), den) for _ in range(len(F)))
    tail = TailRule.constant(Fraction(rng.randint(lo * den, hi * den), den)) if F.space.lazy else None
    return RandomVariable(F, vals, tail)


def _shrink_into(K, X, limit=64):
    for _ in range(limit):
        if K.contains(X):
            return X
        X = X * Fraction(1, 2)
    return None


def _scale_by(X, Y):
    return X * Y


def sample_members(K: L0ConvexSet, like: Element, rng: random.Random, count: int) -> list:
    if isinstance(K, FiniteSet):
        return [rng.choice(K.generators) for _ in range(count)]
    out = []
    while len(out) < count:
        X = _shrink_into(K, sample_element(like, rng))
        if X is not None:
            out.append(X)
    return out


def absorbing_scalar(K: L0ConvexSet, X: Element, bound=SEARCH_BOUND) -> RandomVariable | None:
    """A strictly positive F-scalar ``Y`` with ``X in Y K`` (None if none found)."""
    F = K.F
    if not K.local:
        y = Fraction(1)
        while y <= bound:
            Y = RandomVariable.constant(F, y)
            if K.contains(_scale_by(X, Y.reciprocal())):
                return Y
            y *= 2
        return None
    ys = []
    for i in range(len(F)):
        v = cell_vector(X, F, i)
        y = Fraction(1)
        while not _cell_scaled_member(K, i, v, y):
            y *= 2
            if y > bound:
                return None
        ys.append(y)
    tail = TailRule.constant(1) if F.space.lazy else None
    return RandomVariable(F, tuple(ys), tail)


def check_convex_absorbent_balanced(K: L0ConvexSet, like: Element, trials: int = 100, seed: int = 0) -> Findings:
    """Seeded random check of L0-convexity, absorbency and balancedness.

    Convex combinations use cellwise-varying coefficients in [0, 1];
    balancedness first probes ``Y = -1`` and then random ``|Y| <= 1``.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    rng = random.Random(seed)
    F = K.F
    checks = []

    witness = None
    for _ in range(trials):
        X1, X2 = sample_members(K, like, rng, 2)
        Y = _scalar(F, rng, 0, 1)
        Z = _scale_by(X1, Y) + _scale_by(X2, 1 - Y)
        if not K.contains(Z):
            witness = {"X1": X1, "X2": X2, "Y": Y}
            break
    checks.append(Check("convex", FAIL if witness else PASS, {"witness": witness, "seed": seed}))

    witness = None
    for _ in range(trials):
        X = sample_element(like, rng)
        if absorbing_scalar(K, X) is None:
            witness = {"X": X}
            break
    checks.append(Check("absorbent", FAIL if witness else PASS, {"witness": witness, "seed": seed}))

    witness = None
    minus_one = RandomVariable.constant(F, -1)
    probes = [(X, minus_one) for X in sample_members(K, like, rng, trials)]
    probes += [(X, _scalar(F, rng, -1, 1)) for X in sample_members(K, like, rng, trials)]
    for X, Y in probes:
        if not K.contains(_scale_by(X, Y)):
            witness = {"X": X, "Y": Y}
            break
    checks.append(Check("balanced", FAIL if witness else PASS, {"witness": witness, "seed": seed}))
    return Findings(f"convex/absorbent/balanced: {K.name}", checks)


def gauge_seminorm(K: L0ConvexSet):
    """The gauge of a polytope as a seminorm candidate (exact path only)."""
    from .condnorm import ConditionalSeminorm

    def sq(X):
        g = K.exact_gauge(X)
        if g is None:
            raise InvalidParameter("exact gauge unavailable")
        return g * g

    return ConditionalSeminorm(f"p_{K.name}", sq, False)


# ---------------------------------------------------------------------------
# degenerate gauge and the closure/sublevel relation


@dataclass(frozen=True)
class DegenerateCertificate:
    X: RandomVariable
    deltas: tuple
    families: tuple  # per delta: list of (n, Y_n, exceptional blocks)
    bounds_verified: tuple  # per delta: p_U(X) <= delta verified
    x_in_U: bool | None
    scope: str
    note: str = ("witness family Y_n = delta on blocks <= n, max(|X|, delta) beyond; "
                 "members n <= m explicit, tail members checked symbolically; "
                 "derived here, not taken from a published argument")

    @property
    def valid(self) -> bool:
        return all(self.bounds_verified)

    def to_dict(self) -> dict:
        return {"deltas": list(self.deltas), "bounds_verified": list(self.bounds_verified),
                "x_in_U": self.x_in_U, "scope": self.scope, "note": self.note,
                "families": [[{"n": n, "Y_n": Y, "exceptional_blocks": I} for n, Y, I in fam]
                             for fam in self.families]}


def gauge_degenerate_scenario(X: RandomVariable, deltas: Sequence) -> DegenerateCertificate:
    """Certify ``p_U(X) <= delta`` for each delta via an explicit witness family.

    The scaling ``Y_n`` is ``delta`` on blocks ``<= n`` and ``max(|X|, delta)``
    on later blocks.  Each ``X / Y_n`` is in U with exceptional set
    ``{1..n}``; the family decreases in n and equals delta on block b as soon
    as ``n >= b``, so its essential infimum is delta.  Members ``n <= m`` are
    built and tested explicitly; for a tail block ``b > m`` the member ``Y_b``
    is checked symbolically from the constant tail value ``c`` of X: it is
    in U because ``|c| / max(|c|, delta) <= 1`` beyond b.
    """
    sp = X.space
    if not isinstance(sp, DyadicBlockSpace):
        raise InvalidParameter("the degenerate-gauge scenario needs a dyadic space")
    U = ExceptionalUnitBall(sp)
    alg = X.algebra
    tail_ok = X.tail is not None and X.tail.is_constant
    scope = EXACT if tail_ok else PREFIX_ONLY
    absX = abs(X)
    families, verified = [], []
    for delta in deltas:
        delta = rational(delta)
        if delta <= 0:
            raise InvalidParameter("deltas must be positive")
        fam = []
        ok = True
        prev = None
        for n in range(1, sp.blocks + 1):
            vals = []
            for k, cell in enumerate(alg.cells):
                block = sp.atoms[cell[0]][0]
                vals.append(delta if block <= n else max(absX.values[k], delta))
            tail = None
            if tail_ok:
                tail = TailRule.constant(max(abs(X.tail.value(0)), delta))
            Yn = RandomVariable(alg, tuple(vals), tail)
            scaled = X / Yn
            exc = U.exceptional_blocks(scaled)
            if any(b > n for b in exc):
                ok = False
            if tail_ok and not U.tail_eventually_bounded(scaled):
                ok = False
            if prev is not None and not compare(prev, Yn):
                ok = False
            fam.append((n, Yn, exc))
            prev = Yn
        # member m equals delta on every realised block
        ok = ok and all(v == delta for v in fam[-1][1].values)
        if tail_ok:
            c = abs(X.tail.value(0))
            ok = ok and c / max(c, delta) <= 1
        families.append(tuple(fam))
        verified.append(ok)
    x_in = U.contains(X)
    return DegenerateCertificate(X, tuple(rational(d) for d in deltas), tuple(families), tuple(verified),
                                 x_in.value if x_in.scope == EXACT else None, scope)


def sublevel_closure_check(K: L0ConvexSet, samples: Sequence[Element],
                           eps_schedule: Sequence = (Fraction(1, 2), Fraction(1, 8), Fraction(1, 32))) -> Findings:
    """Compare the closure of K with ``{p_K <= 1}`` on sample elements.

    Interiority of 0 is certified by a ball radius.  For rcc sets every sample
    with gauge at most one also gets the net ``X / max(Y_eps, 1)`` built,
    checked to lie in K and to be within ``eps * ||X||`` of X.
    """
    from .concat import has_rcc, scaling_selection

    checks = []
    r = K.interior_radius()
    interior = r is not None and r.is_strictly_positive
    checks.append(Check("zero-interior", PASS if interior else FAIL, {"radius": r}))
    if not interior:
        checks.append(Check("sublevel-equals-closure", NOT_APPLICABLE,
                            {"reason": "gauge not continuous; equality not asserted"}))
        return Findings(f"sublevel/closure: {K.name}", checks)
    rcc = has_rcc(K)
    rows, nets = [], []
    for X in samples:
        g = gauge(K, X)
        in_sub = all(v <= 1 for v in g.upper.values)
        if not in_sub and not any(v > 1 for v in g.lower.values):
            raise InvalidParameter("sample too close to the boundary for the bisection tolerance")
        in_cl = bool(K.closure_contains(X))
        rows.append({"X": X, "gauge": g, "in_sublevel": in_sub, "in_closure": in_cl})
        if in_sub and rcc.value:
            norm_x = conditional_l2_norm_sq(X, K.F)
            for eps in eps_schedule:
                Y = scaling_selection(K, X, RandomVariable.constant(K.F, eps))
                Y = Y.map(lambda y: max(y, Fraction(1)), Y.tail)
                Z = X * Y.reciprocal()
                dist = conditional_l2_norm_sq(X - Z, K.F)
                close = compare(norm_x * (eps * eps), dist)
                nets.append({"eps": eps, "member": bool(K.contains(Z)), "close": bool(close),
                             "dist_sq": dist})
    disagree = [row for row in rows if row["in_closure"] != row["in_sublevel"]]
    net_ok = all(n["member"] and n["close"] for n in nets)
    summary = {"samples": len(rows), "disagree": disagree, "nets": nets, "rcc": rcc.value,
               "closure_points": sum(row["in_closure"] for row in rows),
               "sublevel_points": sum(row["in_sublevel"] for row in rows)}
    if rcc.value:
        checks.append(Check("sublevel-equals-closure", PASS if not disagree and net_ok else FAIL, summary))
    else:
        summary["note"] = "set lacks rcc; discrepancies are reported, not treated as bugs"
        checks.append(Check("sublevel-equals-closure", FAIL if disagree else PASS, summary,
                            expected=FAIL if disagree else PASS))
        strict = disagree and all(row["in_sublevel"] and not row["in_closure"] for row in disagree)
        checks.append(Check("strict-inclusion", PASS if strict else NOT_APPLICABLE,
                            {"witnesses": [row["X"] for row in disagree]}))
    return Findings(f"sublevel/closure: {K.name}", checks)
