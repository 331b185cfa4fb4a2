"""Graph utilities, fixture generators, MDS and the concentration experiment."""

from .concentration import ConcentrationResult, concentration_experiment, fit_loglog
from .datasets import (
    make_cycle_mesh,
    make_empirical_1d_pair,
    make_equivalent_objects_pair,
    make_isometric_graphs,
    make_noisy_loop_graphs,
    make_sbm,
    make_shifted_image_pair,
    make_toy_trees,
    make_two_hump_series,
    product_metric,
)
from .graph import GraphSpec, shortest_path_matrix, shortest_path_structure
from .mds import mds_embed
