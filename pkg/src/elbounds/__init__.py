"""
Coverage bounds for empirical likelihood ratio confidence regions.

The coverage of an EL region built from a k-dimensional estimating
equation and n observations can never exceed b(k, n), the probability
that n uniform points on the unit sphere surround the origin.
"""
from .bounds import ExactProbability, LevelVerdict, bound_table, check_level, exact_bound, normal_approx_bound
from .circle import CircularDensity, circle_outside_prob, half_circle_mass, line_prob, symmetric_prob
from .el import ELEvaluation, ELSolverError, RegionSpec, chisq_radius, el_logratio, in_region
from .geometry import (
    CardioidCircle,
    HullStatus,
    HullVerdict,
    ShiftedGaussian,
    SignBernoulli,
    UniformSphere,
    VonMisesCircle,
    contains_origin,
    project_to_sphere,
    sample,
)
from .simulation import (
    CoverageProblem,
    MCReport,
    conjecture_scan,
    coverage_curve,
    estimate_coverage,
    estimate_hull_prob,
    verify_projection_invariance,
)

__version__ = "0.1.0"
