"""Second-fundamental-form coefficients and curvature tensors.

The Hessians of all ambient coordinate functions are estimated once via
nested carre du champ; because the normal coordinate functions are linear
in the ambient coordinates, contracting that tensor against the normal and
tangent frames yields the per-point second fundamental form, from which the
Riemann, Ricci, scalar, and (codimension-1) Gaussian curvatures follow by
exact algebra.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .metric import TangentFrameStack, coordinate_gamma_tensor


@dataclass(frozen=True)
class AlphaStack:
    """Per-point (D-d) x d x d second-fundamental-form coefficients in the
    frames used to build them."""

    alphas: np.ndarray  # (n, D-d, d, d), symmetric in the last two indices
    frames: TangentFrameStack

    @property
    def n(self):
        return self.alphas.shape[0]

    @property
    def codim(self):
        return self.alphas.shape[1]

    @property
    def d(self):
        return self.alphas.shape[2]


@dataclass(frozen=True)
class CurvatureStack:
    """Assembled curvature estimates per point.

    ``gaussian`` is present only for hypersurfaces (codimension 1).
    """

    ricci: np.ndarray     # (n, d, d)
    scalar: np.ndarray    # (n,)
    riemann: Optional[np.ndarray] = None  # (n, d, d, d, d)
    gaussian: Optional[np.ndarray] = None


def ambient_hessian_stack(op, pc):
    """Hessian forms of all coordinate triples: (n, D, D, D) tensor with
    entry [i, a, b, c] = H(x_a)(grad x_b, grad x_c) at point i.

    Symmetric in (b, c) by construction.
    """
    x = pc.points
    if op.n != pc.n:
        raise InputError(f"operator size {op.n} does not match cloud size {pc.n}")
    n, D = x.shape
    lx = op.apply(x)
    # raw inner gammas; the local average is applied once to the assembled
    # tensor so the nesting does not compound the smoothing
    g = coordinate_gamma_tensor(op, pc, smooth=False)  # g[:, c, a] = gamma(x_c, x_a)
    lg = op.apply(g.reshape(n, D * D)).reshape(n, D, D)
    # t[:, b, c, a] = gamma(x_b, g[:, c, a]), batched over all triples
    prods = x[:, :, None, None] * g[:, None, :, :]
    lprods = op.apply(prods.reshape(n, D * D * D)).reshape(n, D, D, D)
    t = 0.5 * (
        x[:, :, None, None] * lg[:, None, :, :]
        + g[:, None, :, :] * lx[:, :, None, None]
        - lprods
    )
    # H[a][b][c] = (t[b,c,a] + t[c,b,a] - t[a,b,c]) / 2
    hess = 0.5 * (t.transpose(0, 3, 1, 2) + t.transpose(0, 3, 2, 1) - t)
    return op.smooth(hess.reshape(n, -1)).reshape(n, D, D, D)


def alpha_stack(hess, frames):
    """Contract the ambient Hessian tensor into the estimated frames:
    alpha[l, i, j] = sum_abc n^l_a t_i^b t_j^c H[a, b, c]."""
    n, D = hess.shape[0], hess.shape[1]
    if frames.n != n or frames.D != D:
        raise InputError("frames do not match the Hessian tensor")
    alphas = np.einsum(
        "pal,pabc,pbi,pcj->plij",
        frames.normals, hess, frames.tangents, frames.tangents,
        optimize=True,
    )
    alphas = 0.5 * (alphas + alphas.transpose(0, 1, 3, 2))
    return AlphaStack(alphas=alphas, frames=frames)


def riemann(alpha):
    """Riemann tensor R_ijkl = sum_l (a_ik a_jl - a_jk a_il) over normals."""
    a = alpha.alphas
    return np.einsum("pnik,pnjl->pijkl", a, a) - np.einsum("pnjk,pnil->pijkl", a, a)


def ricci(alpha):
    """Ricci matrix Ric_ij = sum_l sum_k (a_kk a_ij - a_ik a_jk)."""
    a = alpha.alphas
    tr = np.einsum("pnii->pn", a)
    return np.einsum("pn,pnij->pij", tr, a) - np.einsum("pnik,pnjk->pij", a, a)


def scalar(alpha):
    """Scalar curvature S = sum_l ((tr a)^2 - |a|_F^2)."""
    a = alpha.alphas
    tr = np.einsum("pnii->pn", a)
    return np.einsum("pn,pn->p", tr, tr) - np.einsum("pnij,pnij->p", a, a)


def gaussian_curvature(alpha):
    """Determinant of the single Hessian slice; hypersurfaces only."""
    if alpha.codim != 1:
        raise InputError(
            f"Gaussian curvature needs codimension 1, got codimension {alpha.codim}"
        )
    return np.linalg.det(alpha.alphas[:, 0])


def curvature_stack(alpha, with_riemann=True):
    """Assemble all curvature estimates from one AlphaStack."""
    rie = riemann(alpha) if with_riemann else None
    ric = ricci(alpha)
    s = scalar(alpha)
    kappa = gaussian_curvature(alpha) if alpha.codim == 1 else None
    return CurvatureStack(ricci=ric, scalar=s, riemann=rie, gaussian=kappa)
