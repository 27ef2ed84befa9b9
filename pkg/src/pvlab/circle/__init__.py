"""Circle-method layer: cutoffs, model multipliers, prime exponential sums, arcs."""

from pvlab.circle.arcs import (
    ArcDecomposition,
    DirichletApprox,
    arc_classify,
    dirichlet_approx,
    major_arc_error,
    regime,
    vinogradov_bound,
)
from pvlab.circle.assembly import (
    MultiplierGrid,
    assembly_error,
    assembly_report,
    build_nu,
    truncation_level,
)
from pvlab.circle.cutoff import Cutoff, lemma21_check
from pvlab.circle.multipliers import (
    ModelMultiplier,
    integer_exponential_sum,
    minor_arc_ratio,
    model_phi,
    parse_xi,
    prime_exponential_sum,
    prime_sum_grid,
)

__all__ = [
    "ArcDecomposition",
    "Cutoff",
    "DirichletApprox",
    "ModelMultiplier",
    "MultiplierGrid",
    "arc_classify",
    "assembly_error",
    "assembly_report",
    "build_nu",
    "dirichlet_approx",
    "integer_exponential_sum",
    "lemma21_check",
    "major_arc_error",
    "minor_arc_ratio",
    "model_phi",
    "parse_xi",
    "prime_exponential_sum",
    "prime_sum_grid",
    "regime",
    "truncation_level",
    "vinogradov_bound",
]
