import numpy as np
import pytest

import diffgeo as dg
from diffgeo.curvature import AlphaStack
from diffgeo.errors import InputError
from diffgeo.metric import TangentFrameStack

from conftest import interior_mask


def make_alpha(alphas):
    """AlphaStack from raw coefficients with trivial frames."""
    alphas = np.asarray(alphas, dtype=float)
    n, codim, d, _ = alphas.shape
    D = d + codim
    frames = TangentFrameStack(
        d=d,
        tangents=np.tile(np.eye(D)[:, :d], (n, 1, 1)),
        normals=np.tile(np.eye(D)[:, d:], (n, 1, 1)),
    )
    return AlphaStack(alphas=alphas, frames=frames)


def random_alpha(rng, n, d, codim):
    a = rng.standard_normal((n, codim, d, d))
    return make_alpha((a + a.transpose(0, 1, 3, 2)) / 2)


# ---------------------------------------------------------------------------
# exact algebra


def test_riemann_principal_curvatures():
    # single normal, alpha = diag(l1, l2): R_1212 = l1 l2
    alpha = make_alpha(np.diag([2.0, 3.0])[None, None])
    r = dg.riemann(alpha)
    assert r[0, 0, 1, 0, 1] == pytest.approx(6.0)
    assert r[0, 0, 1, 1, 0] == pytest.approx(-6.0)
    assert r[0, 0, 0, 0, 0] == 0.0


def test_riemann_zero_alpha():
    alpha = make_alpha(np.zeros((2, 1, 3, 3)))
    assert np.array_equal(dg.riemann(alpha), np.zeros((2, 3, 3, 3, 3)))


def test_riemann_index_symmetries():
    rng = dg.substream(1, "alg")
    alpha = random_alpha(rng, 10, 3, 2)
    r = dg.riemann(alpha)
    assert np.abs(r + r.transpose(0, 2, 1, 3, 4)).max() < 1e-14  # antisym (i,j)
    assert np.abs(r + r.transpose(0, 1, 2, 4, 3)).max() < 1e-14  # antisym (k,l)
    assert np.abs(r - r.transpose(0, 3, 4, 1, 2)).max() < 1e-14  # pair swap


def test_ricci_principal_curvatures():
    alpha = make_alpha(np.diag([2.0, 3.0])[None, None])
    ric = dg.ricci(alpha)
    assert np.allclose(ric[0], np.diag([6.0, 6.0]))


def test_ricci_is_riemann_contraction():
    rng = dg.substream(2, "alg")
    alpha = random_alpha(rng, 8, 3, 2)
    ric = dg.ricci(alpha)
    contraction = np.einsum("pkikj->pij", dg.riemann(alpha))
    assert np.abs(ric - contraction).max() < 1e-14


def test_scalar_surface_formula():
    alpha = make_alpha(np.diag([2.0, 3.0])[None, None])
    assert dg.scalar(alpha)[0] == pytest.approx(12.0)  # 2 * l1 * l2


def test_scalar_is_ricci_trace():
    rng = dg.substream(3, "alg")
    alpha = random_alpha(rng, 8, 3, 2)
    s = dg.scalar(alpha)
    assert np.abs(s - np.einsum("pii->p", dg.ricci(alpha))).max() < 1e-14


def test_gaussian_curvature_surface():
    alpha = make_alpha(np.eye(2)[None, None])
    assert dg.gaussian_curvature(alpha)[0] == pytest.approx(1.0)
    rng = dg.substream(4, "alg")
    surf = random_alpha(rng, 10, 2, 1)
    kappa = dg.gaussian_curvature(surf)
    assert np.abs(2.0 * kappa - dg.scalar(surf)).max() < 1e-12
    with pytest.raises(InputError):
        dg.gaussian_curvature(random_alpha(rng, 3, 2, 2))


def test_gaussian_parity_under_normal_flip():
    # odd-dimensional hypersurface: kappa flips sign, S does not
    rng = dg.substream(5, "alg")
    alpha = random_alpha(rng, 6, 3, 1)
    flipped = make_alpha(-alpha.alphas)
    assert np.allclose(dg.gaussian_curvature(flipped), -dg.gaussian_curvature(alpha))
    assert np.allclose(dg.scalar(flipped), dg.scalar(alpha))


def test_normal_frame_mixing_invariance():
    rng = dg.substream(6, "alg")
    alpha = random_alpha(rng, 12, 2, 2)
    a = rng.standard_normal((2, 2))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    mixed = make_alpha(np.einsum("lm,pmij->plij", q, alpha.alphas))
    assert np.abs(dg.riemann(mixed) - dg.riemann(alpha)).max() < 1e-10
    assert np.abs(dg.ricci(mixed) - dg.ricci(alpha)).max() < 1e-10
    assert np.abs(dg.scalar(mixed) - dg.scalar(alpha)).max() < 1e-10


def test_scalar_invariant_under_slice_sign_flips():
    rng = dg.substream(7, "alg")
    alpha = random_alpha(rng, 6, 2, 2)
    flipped = alpha.alphas.copy()
    flipped[:, 1] *= -1.0
    assert np.array_equal(dg.scalar(make_alpha(flipped)), dg.scalar(alpha))


# ---------------------------------------------------------------------------
# estimation


def test_ambient_hessian_symmetry_bitwise(circle2000):
    pc, _, geo = circle2000
    hess = dg.ambient_hessian_stack(geo.operator, pc)
    assert np.array_equal(hess, hess.transpose(0, 1, 3, 2))


def test_ambient_hessian_matches_hessian_form(circle2000):
    pc, _, geo = circle2000
    hess = dg.ambient_hessian_stack(geo.operator, pc)
    x, y = pc.points[:, 0], pc.points[:, 1]
    direct = dg.hessian_form(geo.operator, x, x, y)
    assert np.allclose(hess[:, 0, 0, 1], direct, atol=1e-12)


def test_ambient_hessian_flat_square():
    # flat data: coordinate Hessians vanish; tested at a bandwidth wide
    # enough to resolve second derivatives (4x the slope-criterion value,
    # which is tuned for dimension detection rather than Hessians)
    rng = dg.substream(42, "square")
    pc = dg.PointCloud(rng.uniform(0.0, 1.0, (4000, 2)))
    from diffgeo.operator import bandwidth_function, kernel_matrix, knn_graph, select_epsilon

    graph = knn_graph(pc, 128)
    rho = bandwidth_function(graph, 8)
    eps = 4.0 * select_epsilon(pc, graph, rho)
    op = dg.laplacian(kernel_matrix(pc, graph, rho, eps), eps, rho)
    ms = dg.gram_stack(op, pc)
    dg.calibrate(op, ms, 2)
    hess = dg.ambient_hessian_stack(op, pc)
    inner = interior_mask(pc)
    assert np.abs(hess[inner]).mean() < 0.1


def test_ambient_hessian_circle_reference_point(circle2000):
    # grad x vanishes at (1, 0), so H(x)(grad x, grad x) ~ 0 there
    pc, _, geo = circle2000
    hess = dg.ambient_hessian_stack(geo.operator, pc)
    i0 = int(np.argmin((pc.points[:, 0] - 1.0) ** 2 + pc.points[:, 1] ** 2))
    assert abs(hess[i0, 0, 0, 0]) < 0.05


def test_alpha_stack_sphere_principal_curvatures(sphere3000):
    pc, _, geo = sphere3000
    hess = dg.ambient_hessian_stack(geo.operator, pc)
    alpha = dg.alpha_stack(hess, geo.frames)
    assert alpha.codim == 1 and alpha.d == 2
    err = np.linalg.norm(np.abs(alpha.alphas[:, 0]) - np.eye(2), axis=(1, 2))
    assert err.mean() < 0.15


def test_alpha_stack_normal_sign_flip(sphere3000):
    pc, _, geo = sphere3000
    hess = dg.ambient_hessian_stack(geo.operator, pc)
    alpha = dg.alpha_stack(hess, geo.frames)
    flipped_frames = TangentFrameStack(
        d=geo.frames.d, tangents=geo.frames.tangents, normals=-geo.frames.normals
    )
    flipped = dg.alpha_stack(hess, flipped_frames)
    assert np.array_equal(flipped.alphas, -alpha.alphas)


def test_alpha_symmetric_in_tangent_indices(torus_curvature):
    _, _, cur = torus_curvature
    a = cur.alpha.alphas
    assert np.abs(a - a.transpose(0, 1, 3, 2)).max() < 1e-12


def test_codimension_zero_curvature_is_zero(square4000):
    pc, geo = square4000
    hess = dg.ambient_hessian_stack(geo.operator, pc)
    frames = dg.tangent_frames(geo.metric, 2)
    alpha = dg.alpha_stack(hess, frames)
    assert alpha.alphas.shape == (pc.n, 0, 2, 2)
    assert np.array_equal(dg.scalar(alpha), np.zeros(pc.n))
    assert np.array_equal(dg.ricci(alpha), np.zeros((pc.n, 2, 2)))
    with pytest.raises(InputError):
        dg.gaussian_curvature(alpha)


def test_torus_scalar_accuracy(torus_curvature):
    pc, gt, cur = torus_curvature
    assert dg.curvature_mae(cur.scalar, gt, pc) < 0.2


def test_surface_gaussian_vs_scalar_estimates(torus_curvature):
    _, _, cur = torus_curvature
    assert np.abs(2.0 * cur.gaussian - cur.scalar).max() < 1e-12


def test_sphere_scaling_law():
    # doubling the radius quarters the scalar curvature
    means = []
    for radius in (1.0, 2.0):
        pc, _ = dg.sample(dg.ManifoldSpec("sphere", {"d": 2, "radius": radius}), 3000, seed=9)
        means.append(dg.estimate_curvature(pc).scalar.mean())
    assert means[0] / means[1] == pytest.approx(4.0, rel=0.15)


def test_scalar_invariant_under_rigid_motion(torus3000):
    pc, _, _ = torus3000
    cur = dg.estimate_curvature(pc)
    rng = dg.substream(31, "rigid")
    a = rng.standard_normal((3, 3))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    moved = dg.PointCloud(pc.points @ q.T + rng.standard_normal(3))
    cur2 = dg.estimate_curvature(moved)
    assert np.abs(cur.scalar - cur2.scalar).max() < 1e-8


def test_ground_truth_frames_option(torus3000):
    # supplying oracle frames isolates Hessian error from frame error
    pc, gt, geo = torus3000
    proj = gt.project(pc.points)
    normals = gt.normal_at(proj)
    basis = []
    for i in range(pc.n):
        n = normals[i]
        a = np.array([1.0, 0, 0]) if abs(n[0]) < 0.9 else np.array([0, 1.0, 0])
        t1 = np.cross(n, a); t1 /= np.linalg.norm(t1)
        t2 = np.cross(n, t1)
        basis.append(np.column_stack([t1, t2, n]))
    basis = np.array(basis)
    frames = TangentFrameStack(d=2, tangents=basis[:, :, :2], normals=basis[:, :, 2:])
    cur = dg.estimate_curvature(pc, frames=frames)
    assert dg.curvature_mae(cur.scalar, gt, pc) < 0.2


def test_curvature_stack_assembly(torus_curvature):
    _, _, cur = torus_curvature
    from diffgeo.curvature import curvature_stack

    stack = curvature_stack(cur.alpha, with_riemann=True)
    assert stack.riemann.shape == (cur.scalar.shape[0], 2, 2, 2, 2)
    assert np.allclose(np.einsum("pkikj->pij", stack.riemann), stack.ricci, atol=1e-12)
    assert np.allclose(np.einsum("pii->p", stack.ricci), stack.scalar, atol=1e-12)
