"""End-to-end estimation pipelines gluing the building blocks together.

Order of operations mirrors how the estimators depend on each other:
operator -> Gram stack -> dimension (assuming unit calibration) ->
calibration -> frames -> Hessians -> curvature.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .curvature import AlphaStack, alpha_stack, ambient_hessian_stack, curvature_stack
from .errors import NumericalError
from .metric import (
    MetricStack,
    TangentFrameStack,
    calibrate,
    global_dimension,
    gram_stack,
    pointwise_dimension,
    tangent_frames,
)
from .operator import (
    DEFAULT_K,
    DEFAULT_K0,
    LaplacianOperator,
    bandwidth_function,
    kernel_matrix,
    knn_graph,
    laplacian,
    select_epsilon,
)


@dataclass
class GeometryEstimate:
    """Everything the first-order pipeline produces for one cloud."""

    operator: LaplacianOperator
    metric: MetricStack          # calibrated (eigenvalues ~1 on tangent directions)
    dims: np.ndarray             # pointwise dimension estimates
    d_hat: int                   # global dimension estimate
    d_used: int                  # dimension used for calibration and frames
    c_hat: float
    frames: TangentFrameStack


def build_operator(pc, k=None, k0=DEFAULT_K0, epsilon=None):
    """Construct the Laplacian estimate with default parameter policies:
    k = min(n-1, 128) neighbours, k0 = 8 bandwidth neighbours, epsilon from
    the automatic log-log slope criterion unless given."""
    k = min(pc.n - 1, DEFAULT_K) if k is None else k
    graph = knn_graph(pc, k)
    rho = bandwidth_function(graph, min(k0, k))
    eps = select_epsilon(pc, graph, rho) if epsilon is None else float(epsilon)
    kern = kernel_matrix(pc, graph, rho, eps)
    return laplacian(kern, eps, rho)


def estimate_geometry(pc, k=None, k0=DEFAULT_K0, epsilon=None, d=None):
    """Dimension, calibration, and tangent frames for a point cloud.

    ``d`` overrides the estimated global dimension for calibration and
    frame splitting (the estimate is still reported).
    """
    op = build_operator(pc, k=k, k0=k0, epsilon=epsilon)
    ms = gram_stack(op, pc)
    dims = pointwise_dimension(ms)
    d_hat = global_dimension(dims)
    d_used = int(d) if d is not None else d_hat
    if d_used < 1:
        raise NumericalError(
            "estimated dimension is 0; no tangent structure to calibrate against"
        )
    c_hat, ms_cal = calibrate(op, ms, d_used)
    frames = tangent_frames(ms_cal, d_used)
    return GeometryEstimate(
        operator=op,
        metric=ms_cal,
        dims=dims,
        d_hat=d_hat,
        d_used=d_used,
        c_hat=c_hat,
        frames=frames,
    )


@dataclass
class CurvatureEstimate:
    """Curvature pipeline output: the underlying geometry plus tensors."""

    geometry: GeometryEstimate
    alpha: AlphaStack
    ricci: np.ndarray
    scalar: np.ndarray
    riemann: Optional[np.ndarray] = None
    gaussian: Optional[np.ndarray] = None


def estimate_curvature(pc, k=None, k0=DEFAULT_K0, epsilon=None, d=None,
                       frames=None, with_riemann=False):
    """Full curvature pipeline.

    ``frames`` substitutes externally supplied tangent/normal frames (e.g.
    ground truth) for the estimated ones, isolating Hessian error from
    frame error in diagnostics.
    """
    geo = estimate_geometry(pc, k=k, k0=k0, epsilon=epsilon, d=d)
    use_frames = frames if frames is not None else geo.frames
    hess = ambient_hessian_stack(geo.operator, pc)
    alpha = alpha_stack(hess, use_frames)
    stack = curvature_stack(alpha, with_riemann=with_riemann)
    return CurvatureEstimate(
        geometry=geo,
        alpha=alpha,
        ricci=stack.ricci,
        scalar=stack.scalar,
        riemann=stack.riemann,
        gaussian=stack.gaussian,
    )
