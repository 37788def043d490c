"""Dimension, tangent-space, and curvature estimation for point clouds.

The estimators are built on a heat-kernel (diffusion) approximation of the
Laplacian: the carre du champ operator recovers the Riemannian metric of
coordinate gradients, whose per-point Gram matrices yield intrinsic
dimension and tangent frames, and nested carre du champ yields Hessians and
from them the second fundamental form and the Riemann, Ricci, scalar, and
Gaussian curvatures.
"""

__version__ = "0.1.0"

from .bench import (
    ExperimentConfig,
    ResultRow,
    ResultTable,
    curvature_mae,
    error_angle,
    run_bench,
    run_curvature_grid,
    run_dimension_bench,
    run_tangent_grid,
)
from .carre_du_champ import gamma, hessian_form
from .curvature import (
    AlphaStack,
    CurvatureStack,
    alpha_stack,
    ambient_hessian_stack,
    curvature_stack,
    gaussian_curvature,
    ricci,
    riemann,
    scalar,
)
from .errors import InputError, NumericalError
from .lpca import lpca_tangent
from .manifolds import (
    BENCHMARK_SIZES,
    BENCHMARK_SUITE,
    GroundTruth,
    ManifoldSpec,
    ground_truth,
    project_to_manifold,
    sample,
    suite_spec,
    torus_scalar_curvature,
)
from .metric import (
    MetricStack,
    TangentFrameStack,
    calibrate,
    estimate_c,
    global_dimension,
    gram_stack,
    pointwise_dimension,
    tangent_frames,
)
from .operator import (
    LaplacianOperator,
    NeighborGraph,
    bandwidth_function,
    kernel_matrix,
    knn_graph,
    laplacian,
    select_epsilon,
)
from .pipeline import (
    CurvatureEstimate,
    GeometryEstimate,
    build_operator,
    estimate_curvature,
    estimate_geometry,
)
from .point_cloud import PointCloud, add_gaussian_noise, embed_isometric, load_csv, save_csv
from .rng import derive_seed, substream
