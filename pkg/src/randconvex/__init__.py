"""Exact-arithmetic workbench for convex analysis in L0-modules over atomic
probability spaces."""

__version__ = "0.1.0"

from .concat import cc_closure_member, eps_optimal_selection, glue, has_rcc, scaling_selection
from .condnorm import (
    BlockElement,
    conditional_expectation,
    conditional_inner,
    conditional_l2,
    conditional_l2_norm_sq,
)
from .convexity import ExceptionalUnitBall, L0ConvexSet, NormBall, PolytopeSet, gauge
from .l0core import (
    DyadicBlockSpace,
    FiniteAtomicSpace,
    RandomVariable,
    SigmaAlgebra,
    build_dyadic_space,
    compare,
    essinf,
    esssup,
)
from .mazur import (
    cc_hull_member,
    closure_equivalence_check,
    lsc_level_set_check,
    mazur_search,
    plain_hull_lower_bound,
    separation_functional,
    sum_preserves_rcc_check,
)
from .weakdual import DualVector, RademacherNet, pairing, weak_convergence_check

__all__ = [
    "BlockElement", "DualVector", "DyadicBlockSpace", "ExceptionalUnitBall", "FiniteAtomicSpace",
    "L0ConvexSet", "NormBall", "PolytopeSet", "RademacherNet", "RandomVariable", "SigmaAlgebra",
    "build_dyadic_space", "cc_closure_member", "cc_hull_member", "closure_equivalence_check", "compare",
    "conditional_expectation", "conditional_inner", "conditional_l2", "conditional_l2_norm_sq",
    "eps_optimal_selection", "essinf", "esssup", "gauge", "glue", "has_rcc", "lsc_level_set_check",
    "mazur_search", "pairing", "plain_hull_lower_bound", "scaling_selection", "separation_functional",
    "sum_preserves_rcc_check", "weak_convergence_check",
]
