"""Carre du champ operator and the Hessian bilinear form built from it.

Gamma(f, h) = (f L(h) + h L(f) - L(fh)) / 2 recovers the inner product of
gradients from the Laplacian L.  With the positive-semidefinite convention
used by the operator module, the discrete Gamma(f, f) is a nonnegative
kernel-weighted local variance, so no sign flip is needed anywhere.

By default the raw product-rule combination is passed through one step of
the diffusion (a kernel-weighted local average).  The raw values at a point
are a local Monte-Carlo estimate over the few effective kernel neighbours;
the averaging step trades an O(epsilon) bias, the same order the estimator
already carries, for a large variance reduction.  ``hessian_form`` keeps
its inner gamma evaluations raw and averages the assembled result once, so
nesting does not compound the smoothing.

Functions are sampled vectors (one value per data point); products are
taken pointwise.
"""

import numpy as np

from .errors import InputError


def _as_function(op, f):
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.shape[0] != op.n:
        raise InputError(f"expected a length-{op.n} function vector, got shape {f.shape}")
    return f


def gamma(op, f, h, smooth=True):
    """Pointwise estimate of the gradient inner product g(grad f, grad h).

    Exactly bilinear and symmetric in (f, h); ``smooth=False`` skips the
    local-averaging step and returns the raw combination.
    """
    f = _as_function(op, f)
    h = _as_function(op, h)
    raw = 0.5 * (f * op.apply(h) + h * op.apply(f) - op.apply(f * h))
    return op.smooth(raw) if smooth else raw


def hessian_form(op, f, h1, h2):
    """Pointwise estimate of the Hessian H(f)(grad h1, grad h2) via nested
    carre du champ:

        (Gamma(h1, Gamma(h2, f)) + Gamma(h2, Gamma(h1, f))
         - Gamma(f, Gamma(h1, h2))) / 2

    Exactly symmetric in (h1, h2).
    """
    f = _as_function(op, f)
    h1 = _as_function(op, h1)
    h2 = _as_function(op, h2)
    raw = 0.5 * (
        gamma(op, h1, gamma(op, h2, f, smooth=False), smooth=False)
        + gamma(op, h2, gamma(op, h1, f, smooth=False), smooth=False)
        - gamma(op, f, gamma(op, h1, h2, smooth=False), smooth=False)
    )
    return op.smooth(raw)
