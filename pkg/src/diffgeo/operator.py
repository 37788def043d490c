"""Variable-bandwidth heat-kernel matrix and the Laplacian estimate.

Pipeline: exact k-nearest-neighbour graph -> per-point bandwidth function
rho -> automatic global bandwidth epsilon -> sparse Gaussian kernel on the
symmetrised graph -> density-normalised Markov matrix P -> Laplacian.

The returned operator uses the positive-semidefinite sign convention (the
geometer's Laplacian): on the unit circle it maps cos(theta) to approximately
+cos(theta).  Rows are scaled by 4 / (epsilon rho_i^2), the inverse local
second moment of the Gaussian kernel, so the estimate needs no unknown
proportionality constant: the residual calibration factor c is ~1 and is
refined downstream from the metric eigenvalues.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import InputError, NumericalError

DEFAULT_K = 128
DEFAULT_K0 = 8

_RHO_FLOOR = 1e-12


@dataclass(frozen=True)
class NeighborGraph:
    """Exact k-nearest neighbours per point (self excluded).

    ``indices`` and ``distances`` are (n, k) with distances ascending per
    row; ties are broken toward the lower point index.
    """

    k: int
    indices: np.ndarray
    distances: np.ndarray

    @property
    def n(self):
        return self.indices.shape[0]


@dataclass
class LaplacianOperator:
    """Sparse Laplacian estimate built from a point cloud.

    ``matrix`` annihilates constants (rows sum to ~0); ``apply`` multiplies
    by ``scale``, which defaults to 1 and is set to 1/c_hat by metric
    calibration.  ``markov`` is the row-stochastic local-averaging matrix P
    the Laplacian was built from; downstream estimators use one application
    of it to damp pointwise sampling noise.  All fields except ``scale`` are
    fixed at construction.
    """

    matrix: sparse.csr_matrix
    epsilon: float
    rho: np.ndarray
    markov: sparse.csr_matrix = None
    normalization: tuple = ()
    scale: float = 1.0

    @property
    def n(self):
        return self.matrix.shape[0]

    def apply(self, f):
        """Matrix-vector (or matrix-matrix) product, rescaled by ``scale``."""
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.n:
            raise InputError(f"function has length {f.shape[0]}, operator expects {self.n}")
        if not np.isfinite(f).all():
            raise InputError("function values contain NaN or Inf")
        return self.scale * (self.matrix @ f)

    def smooth(self, v):
        """One step of the diffusion: kernel-weighted local average of v."""
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.n:
            raise InputError(f"values have length {v.shape[0]}, operator expects {self.n}")
        return self.markov @ v


def knn_graph(pc, k):
    """Exact k nearest neighbours for every point, ties to the lower index.

    Brute-force scan in blocks; for large n the candidate set is first cut
    down with argpartition, which gives identical results on tie-free data
    and keeps ties deterministic via a stable final sort.
    """
    n = pc.n
    if not 1 <= k <= n - 1:
        raise InputError(f"k must be in [1, n-1] = [1, {n - 1}], got {k}")
    pts = pc.points
    sq = (pts**2).sum(axis=1)
    indices = np.empty((n, k), dtype=np.int64)
    dist2 = np.empty((n, k))
    block = max(1, int(2**22 // max(n, 1)))
    full_sort = n <= 2048
    m = n - 1 if full_sort else min(n - 1, k + 64)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        d2 = sq[lo:hi, None] + sq[None, :] - 2.0 * (pts[lo:hi] @ pts.T)
        np.maximum(d2, 0.0, out=d2)
        d2[np.arange(lo, hi) - lo, np.arange(lo, hi)] = np.inf
        if full_sort:
            order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        else:
            # argpartition's candidate order is arbitrary under ties, so sort
            # candidates by (distance, index) to pin the convention
            cand = np.argpartition(d2, m - 1, axis=1)[:, :m]
            cd = np.take_along_axis(d2, cand, axis=1)
            lex = np.lexsort((cand, cd), axis=1)
            order = np.take_along_axis(cand, lex, axis=1)[:, :k]
        indices[lo:hi] = order
        dist2[lo:hi] = np.take_along_axis(d2, order, axis=1)
    return NeighborGraph(k=k, indices=indices, distances=np.sqrt(dist2))


def bandwidth_function(graph, k0):
    """Per-point bandwidth rho: RMS distance to the k0 nearest neighbours,
    normalised so the geometric mean over the cloud is 1."""
    if not 1 <= k0 <= graph.k:
        raise InputError(f"k0 must be in [1, k] = [1, {graph.k}], got {k0}")
    rho = np.sqrt((graph.distances[:, :k0] ** 2).mean(axis=1))
    if np.any(rho < _RHO_FLOOR):
        warnings.warn("duplicate points: bandwidth floored at 1e-12", stacklevel=2)
        rho = np.maximum(rho, _RHO_FLOOR)
    return rho / np.exp(np.log(rho).mean())


def _sym_pairs(graph):
    """Unique undirected edges (i < j) of the symmetrised kNN graph with
    squared distances."""
    n, k = graph.indices.shape
    rows = np.repeat(np.arange(n), k)
    cols = graph.indices.ravel()
    d2 = (graph.distances.ravel()) ** 2
    i = np.minimum(rows, cols)
    j = np.maximum(rows, cols)
    key = i * n + j
    _, first = np.unique(key, return_index=True)
    return i[first], j[first], d2[first]


def select_epsilon(pc, graph, rho):
    """Automatic bandwidth: maximise the log-log slope of the kernel mass.

    T(eps) sums the kernel over the symmetrised graph (diagonal included) on
    the grid eps = 2^m, m in [-30, 30]; the slope d log T / d log eps is
    taken by central differences and the argmax wins, ties toward smaller
    eps.  T flattens at both extremes, so the maximum is interior.
    """
    del pc  # distances already live in the graph
    i, j, d2 = _sym_pairs(graph)
    u = d2 / (rho[i] * rho[j])
    if not np.any(u > 0):
        raise NumericalError("degenerate cloud: all pairwise distances are zero")
    n = graph.n
    ms = np.arange(-30, 31)
    logT = np.empty(ms.shape)
    for idx, m in enumerate(ms):
        t = n + 2.0 * np.exp(-u * 2.0 ** (-float(m))).sum()
        logT[idx] = np.log(t)
    slopes = (logT[2:] - logT[:-2]) / (2.0 * np.log(2.0))
    if slopes.max() <= 0:
        raise NumericalError("bandwidth selection failed: kernel mass has no growth region")
    best = int(np.argmax(slopes)) + 1
    return float(2.0 ** float(ms[best]))


def kernel_matrix(pc, graph, rho, epsilon):
    """Sparse symmetric heat kernel exp(-d^2 / (eps rho_i rho_j)) on the
    symmetrised graph, with unit diagonal."""
    if epsilon <= 0:
        raise InputError(f"epsilon must be > 0, got {epsilon}")
    n = graph.n
    i, j, d2 = _sym_pairs(graph)
    vals = np.exp(-d2 / (epsilon * (rho[i] * rho[j])))
    rows = np.concatenate([i, j, np.arange(n)])
    cols = np.concatenate([j, i, np.arange(n)])
    data = np.concatenate([vals, vals, np.ones(n)])
    return sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()


def laplacian(kernel, epsilon, rho):
    """Density-normalised Laplacian estimate from a symmetric kernel.

    Steps: divide entries by the product of row sums (removes the sampling
    density to first order), row-normalise to a Markov matrix P, then form
    rows 4 (I - P) / (eps rho_i^2).  The bandwidth factor makes the local
    kernel second moment cancel, so constants are annihilated and smooth
    functions map to their (positive-semidefinite) Laplacian with unit
    proportionality in the limit.

    The row scale uses a kernel-smoothed copy of rho^2 (one application of
    P): rho samples a smooth field through a k0-NN order statistic, and
    dividing by the raw values would multiply that sampling noise into
    every row of the operator.
    """
    if epsilon <= 0:
        raise InputError(f"epsilon must be > 0, got {epsilon}")
    kernel = sparse.csr_matrix(kernel)
    n = kernel.shape[0]
    if kernel.shape[0] != kernel.shape[1]:
        raise InputError("kernel must be square")
    if (kernel - kernel.T).count_nonzero() != 0:
        raise InputError("kernel must be symmetric")
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (n,) or np.any(rho <= 0) or not np.isfinite(rho).all():
        raise InputError("rho must be positive and finite, one value per point")

    q = np.asarray(kernel.sum(axis=1)).ravel()
    bad = np.flatnonzero(q <= 0)
    if bad.size:
        raise NumericalError(f"isolated point: kernel row {bad[0]} has zero sum")
    inv_q = 1.0 / q
    w = sparse.diags(inv_q) @ kernel @ sparse.diags(inv_q)
    s = np.asarray(w.sum(axis=1)).ravel()
    bad = np.flatnonzero(s <= 0)
    if bad.size:
        raise NumericalError(f"isolated point: normalised row {bad[0]} has zero sum")
    p = sparse.csr_matrix(sparse.diags(1.0 / s) @ w)
    rho2 = p @ (rho**2)
    mat = sparse.diags(4.0 / (epsilon * rho2)) @ (sparse.identity(n, format="csr") - p)
    mat = sparse.csr_matrix(mat)
    # one residual sweep pushes row sums from ~1e-13 toward roundoff
    mat = mat - sparse.diags(np.asarray(mat @ np.ones(n)).ravel())
    return LaplacianOperator(
        matrix=sparse.csr_matrix(mat),
        epsilon=float(epsilon),
        rho=rho,
        markov=p,
        normalization=(
            "bi_normalized",
            "row_stochastic",
            "bandwidth_moment_scaled",
            "row_scale_smoothed",
        ),
    )


def dump_sparse(op_or_matrix, path):
    """Debug dump of a sparse operator as 'row col value' text lines."""
    mat = op_or_matrix.matrix if isinstance(op_or_matrix, LaplacianOperator) else op_or_matrix
    coo = sparse.coo_matrix(mat)
    with open(path, "w", encoding="utf-8") as fh:
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v:.17g}\n")
