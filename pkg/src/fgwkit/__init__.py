"""Fused Gromov-Wasserstein distances between structured objects."""

__version__ = "0.1.0"

from .barycenter import BarycenterProblem, BarycenterSolution, recover_adjacency, solve_barycenter
from .core import (
    Coupling,
    Histogram,
    SolverParams,
    StructuredObject,
    Violation,
    check_structured_object,
    euclidean_cost,
    feature_cost_matrix,
    validate,
)
from .estimators import ClassicalMDS, FGWBarycenter, FGWDistance, fgw_distance, pairwise_fgw
from .exceptions import *  # noqa: F401,F403
from .fgw import (
    FgwSolution,
    LossTensor,
    additive_objective,
    apply_loss_tensor,
    feature_term,
    fgw_objective,
    gw_distance,
    gw_solve,
    reparameterize_alpha,
    solve_fgw,
    solve_fgw_path,
    structure_term,
)
from .geodesic import Geodesic, GeodesicPoint, geodesic
from .ot import OtSolution, solve_linear_ot, wasserstein_distance
