"""Local PCA tangent estimation, the classical comparison baseline.

For each point, the covariance of its k nearest neighbours (the point
itself included) is eigendecomposed; the top-d eigenvectors span the
estimated tangent plane.  Unlike the diffusion estimate this has a hard
neighbourhood cutoff, so k trades precision against noise robustness.
"""

import numpy as np

from .errors import InputError
from .metric import TangentFrameStack, eigh_descending
from .operator import knn_graph

#: neighbourhood sizes used for side-by-side comparisons
COMPARISON_KS = (5, 100)


def lpca_tangent(pc, k, d):
    """TangentFrameStack from per-point PCA over k neighbours plus the point.

    Requires d < D and d + 1 <= k <= n - 1.  Uses the same eigenvector sign
    convention as the metric frames, so outputs are directly comparable.
    """
    if not d < pc.D:
        raise InputError(f"d must be < D = {pc.D}, got {d}")
    if k < d + 1:
        raise InputError(f"k={k} too small to resolve a rank-{d} tangent; need k >= {d + 1}")
    if k > pc.n - 1:
        raise InputError(f"k must be <= n-1 = {pc.n - 1}, got {k}")
    graph = knn_graph(pc, k)
    nbrs = pc.points[graph.indices]                      # (n, k, D)
    group = np.concatenate([pc.points[:, None, :], nbrs], axis=1)
    centered = group - group.mean(axis=1, keepdims=True)
    cov = np.einsum("nka,nkb->nab", centered, centered) / group.shape[1]
    _, vecs = eigh_descending(cov)
    return TangentFrameStack(
        d=int(d),
        tangents=np.ascontiguousarray(vecs[:, :, :d]),
        normals=np.ascontiguousarray(vecs[:, :, d:]),
    )
