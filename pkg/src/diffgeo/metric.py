"""Per-point Gram matrices of coordinate gradients and what follows from
them: spectra, the calibration constant c_hat, pointwise and global
dimension, and tangent/normal frames.

For an isometrically embedded manifold the Gram matrix of coordinate
gradients is the orthogonal projection onto the tangent space, so its
top-d eigenvalues are 1 and the rest 0; dimension estimation reads off the
largest gap in that spectrum and calibration reads off the residual scale.
"""

from dataclasses import dataclass

import numpy as np

from .carre_du_champ import gamma
from .errors import InputError, NumericalError


@dataclass(frozen=True)
class MetricStack:
    """Per-point D x D Gram matrices with their eigendecompositions.

    ``eigenvalues`` are sorted descending; ``frames`` holds orthonormal
    eigenvector columns in matching order, sign-fixed so the largest-
    magnitude component of each eigenvector is positive.
    """

    grams: np.ndarray        # (n, D, D)
    eigenvalues: np.ndarray  # (n, D)
    frames: np.ndarray       # (n, D, D)

    @property
    def n(self):
        return self.grams.shape[0]

    @property
    def D(self):
        return self.grams.shape[1]

    def rescaled(self, factor):
        """Same stack with Gram matrices (hence eigenvalues) scaled."""
        return MetricStack(self.grams * factor, self.eigenvalues * factor, self.frames)


@dataclass(frozen=True)
class TangentFrameStack:
    """Orthonormal tangent and normal bases per point for a chosen d."""

    d: int
    tangents: np.ndarray  # (n, D, d)
    normals: np.ndarray   # (n, D, D-d)

    @property
    def n(self):
        return self.tangents.shape[0]

    @property
    def D(self):
        return self.tangents.shape[1]

    @property
    def codim(self):
        return self.normals.shape[2]


def eigh_descending(mats):
    """Batched symmetric eigendecomposition, eigenvalues descending, with a
    deterministic eigenvector sign convention (largest-magnitude component
    positive, first such component on ties)."""
    vals, vecs = np.linalg.eigh(mats)
    vals = vals[:, ::-1]
    vecs = vecs[:, :, ::-1]
    peak = np.abs(vecs).argmax(axis=1)
    peak_vals = np.take_along_axis(vecs, peak[:, None, :], axis=1)[:, 0, :]
    signs = np.where(peak_vals < 0.0, -1.0, 1.0)
    return np.ascontiguousarray(vals), np.ascontiguousarray(vecs * signs[:, None, :])


def coordinate_gamma_tensor(op, pc, smooth=True):
    """All pairwise gamma values of the ambient coordinates, shape (n, D, D).

    Equivalent to D(D+1)/2 gamma() calls, batched through three sparse
    products.
    """
    x = pc.points
    if op.n != pc.n:
        raise InputError(f"operator size {op.n} does not match cloud size {pc.n}")
    n, D = x.shape
    lx = op.apply(x)
    ia, ib = np.triu_indices(D)
    prods = x[:, ia] * x[:, ib]
    lprods = op.apply(prods)
    vals = 0.5 * (x[:, ia] * lx[:, ib] + x[:, ib] * lx[:, ia] - lprods)
    if smooth:
        vals = op.smooth(vals)
    g = np.empty((n, D, D))
    g[:, ia, ib] = vals
    g[:, ib, ia] = vals
    return g


def gram_stack(op, pc):
    """MetricStack of gamma Gram matrices for all ambient coordinate pairs."""
    g = coordinate_gamma_tensor(op, pc)
    vals, vecs = eigh_descending(g)
    return MetricStack(grams=g, eigenvalues=vals, frames=vecs)


def estimate_c(ms, d):
    """Calibration constant: median over points of the mean top-d eigenvalue."""
    if not 1 <= d <= ms.D:
        raise InputError(f"d must be in [1, D] = [1, {ms.D}], got {d}")
    c_hat = float(np.median(ms.eigenvalues[:, :d].mean(axis=1)))
    if not np.isfinite(c_hat) or c_hat <= 0:
        raise NumericalError(f"calibration failed: nonpositive c_hat = {c_hat}")
    return c_hat


def calibrate(op, ms, d):
    """Estimate c_hat and fold 1/c_hat into the operator's scale.

    Returns (c_hat, rescaled MetricStack).  Downstream gamma and Hessian
    evaluations through the operator pick the rescaling up automatically.
    """
    c_hat = estimate_c(ms, d)
    op.scale = op.scale / c_hat
    return c_hat, ms.rescaled(1.0 / c_hat)


def pointwise_dimension(ms):
    """Per-point dimension: argmax of the eigenvalue difference vector
    (1 - l1, l1 - l2, ..., lD), assuming unit calibration; ties go to the
    smaller dimension.  Negative eigenvalues are clamped to 0 first."""
    lam = np.clip(ms.eigenvalues, 0.0, None)
    n, D = lam.shape
    diffs = np.empty((n, D + 1))
    diffs[:, 0] = 1.0 - lam[:, 0]
    diffs[:, 1:D] = lam[:, :-1] - lam[:, 1:]
    diffs[:, D] = lam[:, -1]
    return diffs.argmax(axis=1).astype(np.int64)


def global_dimension(dims):
    """Lower median of the pointwise dimensions (always an attained value)."""
    dims = np.asarray(dims)
    if dims.size == 0:
        raise InputError("cannot take the dimension of an empty set")
    return int(np.sort(dims)[(dims.size - 1) // 2])


def tangent_frames(ms, d):
    """Split each frame into the leading-d tangent and trailing normal
    columns."""
    if not 1 <= d <= ms.D:
        raise InputError(f"d must be in [1, D] = [1, {ms.D}], got {d}")
    return TangentFrameStack(
        d=int(d),
        tangents=np.ascontiguousarray(ms.frames[:, :, :d]),
        normals=np.ascontiguousarray(ms.frames[:, :, d:]),
    )


def gamma_pair(op, pc, a, b):
    """Single-entry reference path: gamma of coordinates a and b."""
    return gamma(op, pc.points[:, a], pc.points[:, b])
