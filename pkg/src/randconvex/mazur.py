"""Randomized Mazur approximation, separation by conditional duals, and the
closure / lower-semicontinuity checks built on them.

Everything works cell by cell: on an atomic conditioning algebra the
countable-concatenation hull of finitely many generators is the set of
elements whose every cell restriction lies in the ordinary convex hull of the
restricted generators.  The plain L0-hull instead fixes one finite generator
subset for the whole space.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .concat import PreconditionViolation, has_rcc
from .condnorm import (
    BlockElement,
    Element,
    InvalidEpsilon,
    conditional_l2_norm_sq,
    default_F,
    sample_element,
    squared_sum_bound,
    sqrt_bracket,
)
from .convexity import L0ConvexSet, NormBall, PolytopeSet, sample_members
from .elements import (
    cell_inner,
    cell_vector,
    from_cell_vectors,
    lin,
    scale_vector,
    unit_like,
    vsub,
)
from .hull import min_norm_point
from .l0core import (
    DyadicBlockSpace,
    EventSet,
    InvalidParameter,
    L0Error,
    RandomVariable,
    SigmaAlgebra,
    is_infinite,
    rational,
)
from .report import FAIL, NOT_APPLICABLE, PASS, PREFIX_ONLY, Check, Findings
from .weakdual import (
    RademacherNet,
    rademacher_net_element,
    rademacher_walsh,
    step_battery,
    weak_convergence_check,
)


class NotSeparable(L0Error):
    pass


# ---------------------------------------------------------------------------
# per-cell projection


def _cell_gram(vecs, F, i):
    n = len(vecs)
    G = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            G[a][b] = G[b][a] = cell_inner(vecs[a], vecs[b], F, i)
    return G


def project_cell(gens: Sequence, x, F: SigmaAlgebra, i: int):
    """Nearest point of ``conv(gens)`` to ``x`` on one cell: ``(weights, dist_sq)``."""
    w, d = min_norm_point(_cell_gram([vsub(g, x) for g in gens], F, i))
    return w, d


@dataclass(frozen=True)
class HullElement:
    """Convex combination of generators with one probability vector per F-cell."""

    F: SigmaAlgebra
    generators: tuple
    weights: tuple
    element: Element

    @property
    def constant_weights(self) -> bool:
        return len(set(self.weights)) <= 1

    def weight_rv(self, j: int) -> RandomVariable:
        return RandomVariable(self.F, tuple(w[j] for w in self.weights))

    def verify(self) -> bool:
        F = self.F
        if len(self.weights) != len(F):
            return False
        for i, w in enumerate(self.weights):
            if len(w) != len(self.generators) or any(x < 0 for x in w) or sum(w) != 1:
                return False
            want = lin(w, [cell_vector(g, F, i) for g in self.generators])
            if cell_vector(self.element, F, i) != want:
                return False
        return True

    def to_dict(self) -> dict:
        return {"weights": [list(w) for w in self.weights], "constant_weights": self.constant_weights}


def hull_element(gens: Sequence[Element], weights: Sequence, F: SigmaAlgebra) -> HullElement:
    weights = tuple(tuple(rational(x) for x in w) for w in weights)
    vecs = [lin(w, [cell_vector(g, F, i) for g in gens]) for i, w in enumerate(weights)]
    return HullElement(F, tuple(gens), weights, from_cell_vectors(gens[0], F, vecs))


def cc_hull_member(generators: Sequence[Element], Z: Element, F: SigmaAlgebra | None = None):
    """Is ``Z`` in the cc-hull of the generators?  Returns ``(bool, HullElement | None)``."""
    if not generators:
        raise InvalidParameter("need at least one generator")
    F = F or default_F(Z)
    weights = []
    for i in range(len(F)):
        w, d = project_cell([cell_vector(g, F, i) for g in generators], cell_vector(Z, F, i), F, i)
        if d != 0:
            return False, None
        weights.append(w)
    return True, hull_element(generators, weights, F)


# ---------------------------------------------------------------------------
# Mazur search


@dataclass
class MazurResult:
    mode: str
    feasible: bool
    residual_sq: RandomVariable
    target: RandomVariable
    failing_cells: list
    hull: HullElement | None = None
    subset: tuple | None = None
    floor_sq: RandomVariable | None = None
    scope: str = "exact"

    def to_dict(self) -> dict:
        d = {"mode": self.mode, "feasible": self.feasible, "residual_sq": self.residual_sq,
             "target": self.target, "failing_cells": self.failing_cells, "scope": self.scope}
        if self.subset is not None:
            d["subset"] = list(self.subset)
        if self.floor_sq is not None:
            d["floor_sq"] = self.floor_sq
        if self.hull is not None:
            d["weights"] = self.hull.to_dict()
        return d


def _check_epsilon(epsilon: RandomVariable):
    if any(v <= 0 for v in epsilon.values) or (epsilon.tail is not None and
                                               epsilon.tail.sign_decision(1, True) is False):
        raise InvalidEpsilon("epsilon must be strictly positive")


def dyadic_epsilon(F: SigmaAlgebra) -> RandomVariable:
    """``sum_k 2**-k 1_{A_k}`` on the block algebra."""
    from .l0core import TailRule
    return RandomVariable(F, tuple(Fraction(1, 2**k) for k in range(1, len(F) + 1)),
                          TailRule.geometric(1, Fraction(1, 2)))


def _cell_search(gens, X, F, i, support):
    idx = list(range(len(gens))) if support is None else list(support[i])
    vecs = [cell_vector(gens[j], F, i) for j in idx]
    w, d = project_cell(vecs, cell_vector(X, F, i), F, i)
    full = [Fraction(0)] * len(gens)
    for j, x in zip(idx, w):
        full[j] = x
    return full, d


def mazur_search(generators: Sequence[Element], X: Element, epsilon: RandomVariable, mode: str = "cc",
                 n_max: int | None = None, support: Sequence | None = None, squared: bool = False,
                 certificate: Findings | None = None, force: bool = False,
                 F: SigmaAlgebra | None = None, max_subsets: int = 5000) -> MazurResult:
    """Approximate ``X`` in conditional norm from the hull of ``generators``.

    ``squared=True`` compares the squared residual with ``epsilon`` itself,
    otherwise with ``epsilon**2``.  ``support[i]`` restricts the generators
    usable on the i-th cell (cc mode only).  Plain mode fixes one subset of
    at most ``n_max`` generators for every cell; the reported residual is that
    of the best subset, ``floor_sq`` the cellwise minimum over all subsets.
    """
    if not generators:
        raise InvalidParameter("need at least one generator")
    if not force:
        if certificate is None:
            raise PreconditionViolation("no weak-convergence certificate (pass force=True to override)")
        try:
            ok = certificate["weakly-convergent"].ok
        except KeyError:
            ok = False
        if not ok:
            raise PreconditionViolation("certificate does not establish weak convergence")
    _check_epsilon(epsilon)
    F = F or default_F(X)
    eps = epsilon.project(F) if epsilon.algebra != F else epsilon
    target = eps if squared else eps * eps
    tvals = target.values
    lazy = F.space.lazy
    scope = PREFIX_ONLY if lazy else "exact"
    if mode == "cc":
        weights, res = [], []
        for i in range(len(F)):
            w, d = _cell_search(generators, X, F, i, support)
            weights.append(w)
            res.append(d)
        hull = hull_element(generators, weights, F)
        R = conditional_l2_norm_sq(X - hull.element, F)
        if tuple(R.values) != tuple(res):
            raise ArithmeticError("residual of the glued element disagrees with the cell search")
        fails = [F.labels[i] for i in range(len(F)) if res[i] > tvals[i]]
        return MazurResult("cc", not fails, RandomVariable(F, tuple(res)), target, fails,
                           hull if not fails else None, None, None, scope)
    if mode != "plain":
        raise InvalidParameter(f"unknown mode {mode!r}")
    if support is not None:
        raise InvalidParameter("plain mode uses one subset for every cell")
    size = min(n_max or len(generators), len(generators))
    subsets = itertools.combinations(range(len(generators)), size)
    best = None
    floor = [None] * len(F)
    for count, S in enumerate(subsets):
        if count >= max_subsets:
            raise InvalidParameter("too many generator subsets to enumerate")
        sup = [S] * len(F)
        weights, res = [], []
        for i in range(len(F)):
            w, d = _cell_search(generators, X, F, i, sup)
            weights.append(w)
            res.append(d)
            floor[i] = d if floor[i] is None else min(floor[i], d)
        fails = [i for i in range(len(F)) if res[i] > tvals[i]]
        key = (len(fails), sum(res))
        if best is None or key < best[0]:
            best = (key, S, weights, res, fails)
    _, S, weights, res, fails = best
    hull = hull_element(generators, weights, F)
    return MazurResult("plain", not fails, RandomVariable(F, tuple(res)), target,
                       [F.labels[i] for i in fails], hull if not fails else None, S,
                       RandomVariable(F, tuple(floor)), scope)


# ---------------------------------------------------------------------------
# the Rademacher net


def net_members(space: DyadicBlockSpace, indices: Sequence[int], explicit: bool = False) -> list:
    """Net members with constant index ``n`` on every block, one per entry."""
    m = space.blocks
    make = rademacher_net_element if explicit else rademacher_walsh
    return [make(space, RademacherNet.constant(n, m)) for n in indices]


def _signs_on_block(members, space, k):
    atoms = [i for i, a in enumerate(space.atoms) if a[0] == k]
    return atoms, [[g.values[a] for g in members] for a in atoms]


def plain_hull_lower_bound(N: int, indices: Sequence[Sequence[int]] | None = None, blocks: int = 4,
                           step: Fraction = Fraction(1, 8)) -> Findings:
    """Exact lower bounds for the plain hull of ``N`` Rademacher net members.

    ``indices[i][k-1]`` is the index of member i on block k (pairwise
    distinct on each block).  Per block: the measure of the region where all
    signs agree, the squared conditional norm of every grid combination
    (evaluated on explicit cells) against ``sum alpha**2`` and ``2**-(N-1)``.
    """
    if N < 1:
        raise InvalidParameter("N must be positive")
    if indices is None:
        indices = [(i,) * blocks for i in range(1, N + 1)]
    indices = [tuple(int(n) for n in ix) for ix in indices]
    if len(indices) != N or any(len(ix) != blocks for ix in indices):
        raise InvalidParameter("one multi-index of length `blocks` per member")
    for k in range(blocks):
        col = [ix[k] for ix in indices]
        if len(set(col)) != N:
            raise InvalidParameter(f"duplicate indices on block {k + 1}: orthogonality fails")
    depths = tuple(max(ix[k] for ix in indices) + 1 for k in range(blocks))
    space = DyadicBlockSpace(blocks, depths)
    members = [rademacher_net_element(space, RademacherNet(ix, ix[-1])) for ix in indices]
    bound_sq = Fraction(1, 2 ** (N - 1))
    den = int(1 / step)
    grid = [tuple(Fraction(c, den) for c in comp)
            for comp in itertools.product(range(den + 1), repeat=N) if sum(comp) == den]
    rows = []
    measure_ok = norm_ok = parseval_ok = True
    worst = None
    for k in range(1, blocks + 1):
        atoms, signs = _signs_on_block(members, space, k)
        p = space.prob
        plus = sum((p[a] for a, s in zip(atoms, signs) if all(x == 1 for x in s)), Fraction(0))
        minus = sum((p[a] for a, s in zip(atoms, signs) if all(x == -1 for x in s)), Fraction(0))
        agree = plus + minus
        floor_measure = Fraction(1, 2 ** (N + k - 1))
        measure_ok &= agree >= floor_measure
        pk = space.block_prob(k)
        block_min = None
        for alpha in grid:
            val = sum((sum((w * x for w, x in zip(alpha, s)), Fraction(0)) ** 2 * p[a]
                       for a, s in zip(atoms, signs)), Fraction(0)) / pk
            ssq = sum(w * w for w in alpha)
            parseval_ok &= val == ssq
            norm_ok &= val >= bound_sq and val >= agree / pk
            block_min = val if block_min is None else min(block_min, val)
        worst = block_min if worst is None else min(worst, block_min)
        rows.append({"block": k, "agree_measure": agree, "all_plus_measure": plus,
                     "bound_measure": floor_measure, "min_norm_sq": block_min, "bound_norm_sq": bound_sq})
    checks = [
        Check("agree-measure", PASS if measure_ok else FAIL,
              {"rule": "P(A_k and all signs agree) >= 2^-(N+k-1)", "blocks": rows}),
        Check("norm-floor", PASS if norm_ok else FAIL,
              {"rule": "||Y|F||^2 >= 2^-(N-1) for every grid combination", "grid_points": len(grid),
               "min_norm_sq": worst}),
        Check("parseval", PASS if parseval_ok else FAIL,
              {"rule": "explicit squared norm == sum alpha^2"}),
    ]
    return Findings(f"plain hull lower bound N={N}", checks)


# ---------------------------------------------------------------------------
# separation


@dataclass
class SeparationCertificate:
    """Affine separation ``Z -> <Z - shift, Y>`` on the event ``C``.

    ``sup_M <. - shift, Y> <= 1`` with ``M = conv(generators) + {||b|F||**2 <= radius_sq}``
    and ``<X - shift, Y> > 1`` on ``C``; since the functional is dominated
    by the gauge of ``M - shift`` this bounds that gauge at ``X`` below by
    ``gauge_lower > 1``.
    """

    Y: Element
    shift: Element
    C: EventSet
    radius_sq: RandomVariable
    gauge_lower: RandomVariable
    description: str = ""
    bound: Fraction = Fraction(1)
    verified: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        F = self.C.algebra
        return {"C": [F.labels[i] for i in sorted(self.C.cells)], "measure": self.C.measure,
                "bound": self.bound, "gauge_lower": self.gauge_lower, "radius_sq": self.radius_sq,
                "M": self.description, "verified": self.verified}


def _sup_ok(val, rad_sq, ysq) -> bool:
    """``val + sqrt(rad_sq * ysq) <= 1`` exactly."""
    t = 1 - val
    return t >= 0 and t * t >= rad_sq * ysq


def _margin(rad_sq, vsq):
    """Rational ``m`` with ``sqrt(rad_sq * vsq) <= m < vsq`` (needs ``rad_sq < vsq``)."""
    if vsq * vsq >= 4 * rad_sq * vsq:
        return vsq / 2
    tol = vsq / 4
    while True:
        hi = sqrt_bracket(rad_sq * vsq, tol)[1]
        if hi < vsq:
            return hi
        tol /= 16


def separation_functional(generators: Sequence[Element], X: Element, epsilon, squared: bool = False,
                          F: SigmaAlgebra | None = None, trials: int = 20,
                          seed: int = 0) -> SeparationCertificate:
    """Separate ``X`` from ``conv(generators) + B_{eps/2}`` cell by cell.

    The normal direction is ``X - z*`` with ``z*`` the exact projection of X
    onto the cell hull.  ``squared=True`` reads the ball as
    ``||b|F||**2 <= eps/2``, otherwise ``||b|F|| <= eps/2``.
    """
    if not generators:
        raise InvalidParameter("need at least one generator")
    F = F or default_F(X)
    if not isinstance(epsilon, RandomVariable):
        epsilon = RandomVariable.constant(F, rational(epsilon))
    if any(v < 0 for v in epsilon.values):
        raise InvalidEpsilon("epsilon must be non-negative")
    eps = epsilon.project(F) if epsilon.algebra != F else epsilon
    rad = [e / 2 if squared else e * e / 4 for e in eps.values]
    Ys, shifts, cells, lower = [], [], [], []
    for i in range(len(F)):
        gv = [cell_vector(g, F, i) for g in generators]
        x = cell_vector(X, F, i)
        zero = scale_vector(x, 0)
        w, d = project_cell(gv, x, F, i)
        if d <= rad[i]:
            Ys.append(zero)
            shifts.append(zero)
            lower.append(Fraction(0))
            continue
        z = lin(w, gv)
        v = vsub(x, z)
        vsq = d
        m = _margin(rad[i], vsq)
        c = cell_inner(z, v, F, i) + m
        s = zero
        if c <= 0:
            s = gv[0]
            c = cell_inner(vsub(z, s), v, F, i) + m
        Y = scale_vector(v, 1 / c)
        Ys.append(Y)
        shifts.append(s)
        cells.append(i)
        lower.append(cell_inner(vsub(x, s), Y, F, i))
    if not cells:
        raise NotSeparable("X lies within eps/2 of the hull on every cell")
    cert = SeparationCertificate(
        from_cell_vectors(X, F, Ys), from_cell_vectors(X, F, shifts),
        EventSet(F, frozenset(cells)), RandomVariable(F, tuple(rad)), RandomVariable(F, tuple(lower)),
        "conv(generators) + {||b|F||^2 <= r^2}")
    cert.verified = verify_separation(cert, generators, X, trials, seed)
    if not all(cert.verified.values()):
        raise ArithmeticError(f"separation certificate failed verification: {cert.verified}")
    return cert


def verify_separation(cert: SeparationCertificate, generators: Sequence[Element], X: Element,
                      trials: int = 20, seed: int = 0) -> dict:
    """Both inequalities, exactly on generators and on sampled points of M."""
    F = cert.C.algebra
    rng = random.Random(seed)
    gens_ok = x_ok = samples_ok = True
    for i in sorted(cert.C.cells):
        Y = cell_vector(cert.Y, F, i)
        s = cell_vector(cert.shift, F, i)
        r2 = cert.radius_sq.values[i]
        ysq = cell_inner(Y, Y, F, i)
        gv = [cell_vector(g, F, i) for g in generators]
        for g in gv:
            gens_ok &= _sup_ok(cell_inner(vsub(g, s), Y, F, i), r2, ysq)
        x_ok &= cell_inner(vsub(cell_vector(X, F, i), s), Y, F, i) > cert.bound
        dirs = gv + [unit_like(gv[0])]
        for _ in range(trials):
            w = [Fraction(rng.randint(0, 8)) for _ in gv]
            if sum(w) == 0:
                w[0] = Fraction(1)
            z = lin([a / sum(w) for a in w], gv)
            u = lin([Fraction(rng.randint(-4, 4), 4) for _ in dirs], dirs)
            usq = cell_inner(u, u, F, i)
            if usq and r2:
                f = sqrt_bracket(r2 / usq, Fraction(1, 2**20))[0]
                b = scale_vector(u, f)
                z = lin([1, 1], [z, b])
            samples_ok &= cell_inner(vsub(z, s), Y, F, i) <= cert.bound
    return {"generators": gens_ok, "X": x_ok, "sampled_M": samples_ok}


def set_separator(K: L0ConvexSet, X: Element) -> SeparationCertificate | None:
    """A dual vector separating ``X`` from the closed set ``K`` where possible.

    Polytopes use their most violated facet, balls the direction of X, and
    generator hulls the projection; returns None when no cell separates.
    """
    F = K.F
    if isinstance(K, HullSet):
        try:
            return separation_functional(K.generators, X, 0, False, F)
        except NotSeparable:
            return None
    zero_r = RandomVariable.constant(F, 0)
    Ys, cells, lower = [], [], []
    if isinstance(K, PolytopeSet):
        p = F.space.prob
        for i, cell in enumerate(F.cells):
            v = cell_vector(X, F, i)
            best = None
            for a, b in K.facets[i]:
                if b <= 0:
                    raise InvalidParameter("facet separators need 0 in the interior")
                r = sum((x * y for x, y in zip(a, v)), Fraction(0)) / b
                if r > 1 and (best is None or r > best[0]):
                    best = (r, a, b)
            if best is None:
                Ys.append(scale_vector(v, 0))
                lower.append(Fraction(0))
                continue
            r, a, b = best
            Ys.append(tuple(x * F.cell_probs[i] / (p[at] * b) for x, at in zip(a, cell)))
            cells.append(i)
            lower.append(r)
    elif isinstance(K, NormBall):
        r2 = K._r2.values
        for i in range(len(F)):
            v = cell_vector(X, F, i)
            vsq = cell_inner(v, v, F, i)
            if vsq <= r2[i]:
                Ys.append(scale_vector(v, 0))
                lower.append(Fraction(0))
                continue
            # t with t^2 r^2 |v|^2 <= 1 and t |v|^2 > 1
            tol = Fraction(1, 4)
            while True:
                hi = sqrt_bracket(r2[i] * vsq, tol)[1]
                if hi < vsq:
                    break
                tol /= 16
            t = 1 / hi if hi > 0 else 2 / vsq
            Ys.append(scale_vector(v, t))
            cells.append(i)
            lower.append(t * vsq)
    else:
        raise InvalidParameter(f"no separator for {K!r}")
    if not cells:
        return None
    zero = from_cell_vectors(X, F, [scale_vector(cell_vector(X, F, i), 0) for i in range(len(F))])
    cert = SeparationCertificate(from_cell_vectors(X, F, Ys), zero, EventSet(F, frozenset(cells)),
                                 zero_r, RandomVariable(F, tuple(lower)), K.name)
    cert.verified = _verify_set_separator(K, cert, X)
    return cert


def _verify_set_separator(K, cert, X, trials: int = 20, seed: int = 0) -> dict:
    F = K.F
    x_ok = sup_ok = True
    for i in sorted(cert.C.cells):
        Y = cell_vector(cert.Y, F, i)
        x_ok &= cell_inner(cell_vector(X, F, i), Y, F, i) > 1
        if isinstance(K, NormBall):
            sup_ok &= _sup_ok(Fraction(0), K._r2.values[i], cell_inner(Y, Y, F, i))
    rng = random.Random(seed)
    for Z in _members(K, X, rng, trials):
        for i in sorted(cert.C.cells):
            sup_ok &= cell_inner(cell_vector(Z, F, i), cell_vector(cert.Y, F, i), F, i) <= 1
    return {"X": x_ok, "sup_K": sup_ok}


class HullSet(L0ConvexSet):
    """Cellwise convex hull of finitely many generators (the cc-hull)."""

    def __init__(self, F: SigmaAlgebra, generators: Sequence[Element], name: str = "hull"):
        if not generators:
            raise InvalidParameter("empty generator list")
        super().__init__(F, None, generators, name=name)

    def cell_member(self, i, v):
        return project_cell([cell_vector(g, self.F, i) for g in self.generators], v, self.F, i)[1] == 0


# ---------------------------------------------------------------------------
# closure equivalence


@dataclass(frozen=True)
class RademacherHull:
    """Hull of the first members of the Rademacher net on a dyadic space.

    ``mode="plain"`` is the L0-hull of ``N`` members (indices 1..N); ``"cc"``
    its countable-concatenation closure over the whole net, realised on
    block k by the members with indices ``1..2**(k+1)``.
    """

    space: DyadicBlockSpace
    N: int
    mode: str = "plain"


def _test_points(K: L0ConvexSet, like: Element, rng: random.Random, trials: int) -> list:
    pts = []
    for _ in range(trials):
        X = sample_element(like, rng)
        pts.append(X)
        g = K.exact_gauge(X)
        if g is not None and all(v > 0 for v in g.values):
            pts.append(X * g.reciprocal())
        for t in (Fraction(1, 2), Fraction(2)):
            pts.append(X * t)
    return pts


def closure_equivalence_check(K, like: Element | None = None, trials: int = 20, seed: int = 0,
                              battery_size: int = 10, battery_depth: int = 4) -> Findings:
    """Norm closure versus weak closure on sampled points.

    A point is in the weak closure when no separating dual vector exists;
    on finite atomic spaces the two must agree point by point.  For the
    Rademacher-net hulls the weak limit 0 of the net is tested instead.
    """
    if isinstance(K, RademacherHull):
        return _example2_gap(K, battery_size, battery_depth, seed)
    rcc = has_rcc(K)
    if not rcc:
        raise PreconditionViolation(f"{K!r} lacks the relative countable concatenation property")
    rng = random.Random(seed)
    like = like if like is not None else RandomVariable.constant(K.F, 0)
    rows, agree, verified = [], True, True
    for X in _test_points(K, like, rng, trials):
        norm = bool(K.closure_contains(X))
        cert = set_separator(K, X)
        weak = cert is None
        if cert is not None:
            verified &= all(cert.verified.values())
        agree &= norm == weak
        if norm != weak:
            rows.append({"X": X, "norm_closure": norm, "weak_closure": weak})
    scope = "structural: finite-dimensional cells" if not K.F.space.lazy else "realised blocks"
    status = PASS if agree else FAIL
    if status == PASS and K.F.space.lazy:
        status = PREFIX_ONLY
    return Findings(f"closure equivalence {K.name}", [
        Check("rcc", PASS, {"certificate": rcc.certificate}),
        Check("closures-coincide", status, {"scope": scope, "seed": seed, "disagreements": rows}),
        Check("separators-verified", PASS if verified else FAIL, {"seed": seed}),
    ])


def _example2_gap(H: RademacherHull, battery_size: int, battery_depth: int, seed: int) -> Findings:
    space = H.space
    F = space.coarse
    m = space.blocks
    zero = BlockElement.zero(space)
    battery = step_battery(space, battery_size, battery_depth, seed)
    schedule = list(range(1, battery_depth + 1))
    weak = weak_convergence_check(lambda n: rademacher_walsh(space, RademacherNet.constant(n, m)),
                                  zero, battery, schedule)
    eps = dyadic_epsilon(F)
    checks = list(weak.checks)
    if H.mode == "plain":
        gens = net_members(space, range(1, H.N + 1))
        res = mazur_search(gens, zero, eps, "plain", H.N, squared=True, certificate=weak)
        floor = Fraction(1, 2 ** (H.N - 1))
        gap = all(v >= floor for v in res.residual_sq.values)
        checks.append(Check("plain-hull-residual-floor", PASS if gap else FAIL,
                            {"rule": "||0 - Z|F||^2 >= 2^-(N-1) on every block", "search": res}))
        try:
            cert = separation_functional(gens, zero, eps, True, F)
            sep = {"certificate": cert}
            sep_status = PASS
        except NotSeparable:
            sep, sep_status = {}, FAIL
        checks.append(Check("norm-separated", sep_status, sep))
        checks.append(Check("closures-coincide", FAIL if gap else PASS,
                            {"verdict": "plain hull cannot reach limit" if gap else "no gap",
                             "weak_limit": "0"}, expected=FAIL))
    else:
        count = 2 ** (m + 1)
        gens = net_members(space, range(1, count + 1))
        support = [range(2 ** (k + 1)) for k in range(1, m + 1)]
        res = mazur_search(gens, zero, eps, "cc", support=support, squared=True, certificate=weak)
        exact = all(v == Fraction(1, 2 ** (k + 1)) for k, v in enumerate(res.residual_sq.values, 1))
        checks.append(Check("cc-approximation", PASS if res.feasible and exact else FAIL,
                            {"rule": "residual^2 == 2^-(k+1) < 2^-k", "search": res}))
        checks.append(Check("closures-coincide", PREFIX_ONLY if res.feasible else FAIL,
                            {"verdict": "0 approachable within eps on realised blocks"}))
    return Findings(f"rademacher {H.mode} hull", checks)


# ---------------------------------------------------------------------------
# lower semicontinuity


@dataclass
class Functional:
    """``f: E -> L0``; ``squared`` means ``evaluate`` returns ``f**2`` (with f >= 0)."""

    name: str
    evaluate: Callable[[Element], RandomVariable]
    F: SigmaAlgebra
    squared: bool = False
    level_set: Callable[[RandomVariable], L0ConvexSet] | None = None


def norm_functional(F: SigmaAlgebra) -> Functional:
    return Functional("cond-l2", lambda X: conditional_l2_norm_sq(X, F), F, True,
                      lambda Y0: NormBall(F, Y0, name="level-ball"))


def pairing_functional(Y: RandomVariable, F: SigmaAlgebra) -> Functional:
    """``X -> E[XY|F]``; level sets are per-cell half-spaces."""
    from .condnorm import conditional_inner

    def level(Y0):
        p = F.space.prob
        facets = []
        for i, cell in enumerate(F.cells):
            yv = cell_vector(Y, F, i)
            a = tuple(y * p[at] / F.cell_probs[i] for y, at in zip(yv, cell))
            facets.append([(a, Y0.values[i])])
        return PolytopeSet(F, facets, name="half-space")

    return Functional("pairing", lambda X: conditional_inner(X, Y, F), F, False, level)


def global_sup_functional(F: SigmaAlgebra) -> Functional:
    """The largest value of X over the whole space, broadcast as a constant.

    Proper and convex under constant weights, but not local: it sees values
    outside the event.  With cell-varying weights convexity fails as well.
    """

    def ev(X):
        return RandomVariable.constant(F, max(X.values))

    def level(Y0):
        if any(len(c) != 1 for c in F.cells):
            raise InvalidParameter("needs singleton cells")
        y = min(Y0.values)
        return PolytopeSet(F, [[((1,), y)] for _ in F.cells], name="sup-level")

    return Functional("global-sup", ev, F, False, level)


def _local_witness(f: Functional, X: Element, cells: frozenset):
    F = f.F
    ind = EventSet(F, cells).indicator()
    lhs = f.evaluate(X) * ind
    rhs = f.evaluate(X * ind) * ind
    if not lhs.same_values(rhs):
        return {"A": [F.labels[i] for i in sorted(cells)], "X": X, "lhs": lhs, "rhs": rhs}
    return None


def lsc_level_set_check(f: Functional, levels: Sequence[RandomVariable], like: Element, trials: int = 20,
                        seed: int = 0, expect: dict | None = None) -> Findings:
    """Local property, L0-convexity, closed level sets and properness of ``f``.

    ``expect`` maps check names to the status the caller anticipates (all
    pass by default).
    """
    expect = expect or {}
    F = f.F
    rng = random.Random(seed)
    n = len(F)
    local_wit = None
    for _ in range(trials):
        X = sample_element(like, rng)
        size = rng.randint(1, max(1, n - 1))
        cells = frozenset(rng.sample(range(n), size))
        local_wit = _local_witness(f, X, cells)
        if local_wit is not None:
            break
    convex_ok, conv_wit = True, None
    for _ in range(trials):
        X1, X2 = sample_element(like, rng), sample_element(like, rng)
        Y = RandomVariable(F, tuple(Fraction(rng.randint(0, 8), 8) for _ in range(n)))
        Yc = RandomVariable.constant(F, 1) - Y
        fm = f.evaluate(X1 * Y + X2 * Yc)
        f1, f2 = f.evaluate(X1), f.evaluate(X2)
        for i in range(n):
            y, yc = Y.values[i], Yc.values[i]
            if f.squared:
                ok = squared_sum_bound(fm.values[i], [y * y * f1.values[i], yc * yc * f2.values[i]])
            else:
                ok = fm.values[i] <= y * f1.values[i] + yc * f2.values[i]
            if not ok:
                convex_ok, conv_wit = False, {"X1": X1, "X2": X2, "Y": Y, "cell": F.labels[i]}
                break
        if not convex_ok:
            break
    closed = []
    closed_ok = True
    for j, Y0 in enumerate(levels):
        if f.level_set is None:
            closed.append({"level": Y0, "status": NOT_APPLICABLE})
            continue
        K = f.level_set(Y0)
        rep = closure_equivalence_check(K, like, max(2, trials // 4), seed + j)
        closed_ok &= rep.ok
        closed.append({"level": Y0, "status": rep["closures-coincide"].status})
    proper = True
    for _ in range(trials):
        v = f.evaluate(sample_element(like, rng))
        proper &= not any(is_infinite(x) for x in v.values)
    checks = [
        Check("local-property", PASS if local_wit is None else FAIL,
              {"witness": local_wit, "seed": seed}),
        Check("l0-convex", PASS if convex_ok else FAIL, {"witness": conv_wit, "seed": seed}),
        Check("level-sets-closed", PASS if closed_ok else FAIL, {"levels": closed}),
        Check("proper", PASS if proper else FAIL, {"seed": seed}),
    ]
    for c in checks:
        c.expected = expect.get(c.name, PASS)
    if local_wit is None and closed_ok and convex_ok:
        checks.append(Check("weakly-lsc", PASS, {"reason": "local, convex, closed level sets"}))
    return Findings(f"lsc {f.name}", checks)


# ---------------------------------------------------------------------------
# sums of rcc sets


def minkowski_sum(L: L0ConvexSet, M: L0ConvexSet) -> L0ConvexSet | None:
    if isinstance(L, NormBall) and isinstance(M, NormBall):
        return NormBall(L.F, L.radius + M.radius, name=f"{L.name}+{M.name}")
    if isinstance(L, HullSet) and isinstance(M, HullSet):
        gens = [a + b for a in L.generators for b in M.generators]
        return HullSet(L.F, gens, name=f"{L.name}+{M.name}")
    return None


def _members(K: L0ConvexSet, like: Element, rng: random.Random, count: int) -> list:
    if not isinstance(K, HullSet):
        return sample_members(K, like, rng, count)
    out = []
    for _ in range(count):
        w = [Fraction(rng.randint(0, 4)) for _ in K.generators]
        w[rng.randrange(len(w))] += 1
        out.append(hull_element(K.generators, [[x / sum(w) for x in w]] * len(K.F), K.F).element)
    return out


def sum_preserves_rcc_check(L, M, trials: int = 20, seed: int = 0) -> Findings:
    """rcc of both summands, then of their Minkowski sum.

    Besides the structural decision, members of the sum are glued across
    cells at random and re-tested.
    """
    rl, rm = has_rcc(L), has_rcc(M)
    checks = [Check("rcc-L", PASS if rl else FAIL, {"certificate": rl.certificate}, expected=PASS if rl else FAIL),
              Check("rcc-M", PASS if rm else FAIL, {"certificate": rm.certificate}, expected=PASS if rm else FAIL)]
    if not (rl and rm):
        checks.append(Check("rcc-sum", NOT_APPLICABLE, {"reason": "premise fails"}, expected=NOT_APPLICABLE))
        return Findings("sum preserves rcc", checks)
    S = minkowski_sum(L, M)
    if S is None:
        checks.append(Check("rcc-sum", NOT_APPLICABLE, {"reason": "no Minkowski-sum oracle"},
                            expected=NOT_APPLICABLE))
        return Findings("sum preserves rcc", checks)
    rs = has_rcc(S)
    F = S.F
    rng = random.Random(seed)
    like = RandomVariable.constant(F, 0)
    glue_ok = True
    members = _members(S, like, rng, max(2, trials))
    for _ in range(trials):
        pick = [rng.choice(members) for _ in range(len(F))]
        glued = from_cell_vectors(pick[0], F, [cell_vector(Z, F, i) for i, Z in enumerate(pick)])
        glue_ok &= bool(S.contains(glued))
    status = PASS if rs and glue_ok else FAIL
    if status == PASS and F.space.lazy:
        status = PREFIX_ONLY
    checks.append(Check("rcc-sum", status, {"certificate": rs.certificate, "sum": S.name,
                                            "sampled_gluings": trials, "seed": seed}))
    return Findings("sum preserves rcc", checks)
