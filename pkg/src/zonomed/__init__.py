"""zonomed: zonotope medians and Steiner symmetrization of measures.

Four areas, one namespace:

* zonotopes built from point samples, with exact and Monte Carlo intrinsic
  volumes, the Wills functional, and 2D boundary realizations;
* the V_j-median family (L1, intermediate, Oja), Wills and polar medians;
* closed-form Steiner symmetrization of Gaussian laws, including the
  arithmetic/harmonic eigenvalue iteration to spherical symmetry;
* sample-based symmetrization with exact polygon symmetrals and isotropy
  diagnostics.
"""

__version__ = "0.1.0"

from .empirical import (
    EmpiricalSample,
    IsotropyReport,
    NormReduction,
    RegressorConfig,
    Theorem1Report,
    complement_basis,
    conjecture_explorer,
    norm_reduction_check,
    polygon_steiner_symmetral_2d,
    sample_uniform_polygon,
    symmetrize_sample,
    theorem1_check,
)
from .errors import (
    DegenerateCloudError,
    DegeneratePolygonError,
    DivergentPolarError,
    FlatZonotopeError,
    ZonomedError,
)
from .gauss import (
    GaussianState,
    SymmetrizationStep,
    SymmetrizationTrace,
    double_mean_update,
    eigenpair_direction,
    make_projector,
    regression_coefficient,
    sphere_iterate,
    symmetrize_gaussian,
)
from .medians import (
    MedianProblem,
    MedianResult,
    SolverOptions,
    grid_oracle,
    polar_median,
    polar_objective,
    polar_surrogate,
    v1_median,
    vd_median,
    vj_median,
    vj_objective,
    wills_median,
)
from .polygon import (
    ConvexPolygon2D,
    dist_to_polygon,
    distances_to_polygon,
    steiner_polynomial_check_2d,
    wills_mc_check,
    zonotope_polygon_2d,
)
from .zonotope import (
    BallConstants,
    MonteCarloEstimate,
    PointCloud,
    Zonotope,
    build_discrepancy_zonotope,
    intrinsic_volume,
    mc_intrinsic_volume,
    unit_ball_volume,
    wills_functional,
)
