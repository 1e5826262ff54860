"""Numerical verification of comparison estimates for isotropic quasilinear operators.

Spaces are weighted intervals ``([0, L], e^{-f} ds)``; curvature enters only
through the density. The modules are layered:

- ``geometry``: curvature bounds, model densities, comparison functions
- ``operators``: the isotropic operator catalog and lower-order terms
- ``scheme`` / ``pde``: monotone explicit and pseudo-time solvers
- ``comparison``: one-dimensional barriers and their inverses
- ``eigen``: first eigenvalues by shooting, plus a variational cross-check
- ``verify``: the numerical checks, each returning a ``CheckReport``
- ``cli``: the JSON scenario runner
"""

from .comparison import (
    ComparisonProfile,
    InverseProfile,
    barrier_elliptic,
    check_profile_admissible,
    evolve_profile,
    invert_profile,
)
from .eigen import (
    EigenResult,
    neumann_1d_model,
    pi_p,
    rayleigh_p,
    shoot_1d_model,
    shoot_weighted_interval,
)
from .errors import QcompError
from .geometry import (
    ZERO,
    CurvatureParams,
    ExprDensity,
    SplineDensity,
    WarpedModel,
    WeightedInterval,
    boundary_hf,
    c_kappa_lambda,
    comparison_drift,
    effective_bounds,
    first_zero,
    model_density,
    ricci_f_N,
    t_kappa_lambda,
)
from .operators import CATALOG_NAMES, NO_SOURCE, SourceTerm, catalog, evaluate_radial, homogeneity_check
from .pde import Field1D, SolverConfig, Trajectory, solve_elliptic, solve_parabolic
from .report import CheckReport
from .verify import (
    ModulusCurve,
    RadialProfile,
    check_decay,
    check_eigen_comparison,
    check_gradient_bound,
    check_mc_dominated,
    check_supersolution_boundary,
    check_two_point_drift,
    decay_rate_estimate,
    modulus_of_continuity,
)

__version__ = "0.1.0"
