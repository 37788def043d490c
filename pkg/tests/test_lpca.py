import numpy as np
import pytest

import diffgeo as dg
from diffgeo.errors import InputError


def test_colinear_points_rank_one():
    t = np.linspace(0, 1, 10)
    direction = np.array([2.0, 1.0, -1.0]) / np.linalg.norm([2.0, 1.0, -1.0])
    pc = dg.PointCloud(np.outer(t, direction))
    frames = dg.lpca_tangent(pc, 5, 1)
    tangents = frames.tangents[:, :, 0]
    cross = np.abs(np.cross(tangents, direction[None, :]))
    assert cross.max() < 1e-10


def test_coplanar_points_plane_normal():
    rng = dg.substream(1, "plane")
    uv = rng.standard_normal((40, 2))
    basis = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]])
    basis[1] /= np.linalg.norm(basis[1])
    pc = dg.PointCloud(uv @ basis)
    frames = dg.lpca_tangent(pc, 10, 2)
    normal = np.cross(basis[0], basis[1])
    normal /= np.linalg.norm(normal)
    dots = np.abs((frames.normals[:, :, 0] * normal).sum(axis=1))
    assert np.abs(dots - 1.0).max() < 1e-10


def test_full_neighbourhood_reduces_to_global_pca():
    rng = dg.substream(2, "pca")
    pc = dg.PointCloud(rng.standard_normal((60, 4)) * np.array([3.0, 2.0, 1.0, 0.1]))
    frames = dg.lpca_tangent(pc, 59, 2)
    centered = pc.points - pc.points.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    global_t = vt[:2].T
    for i in range(pc.n):
        overlap = np.linalg.svd(frames.tangents[i].T @ global_t, compute_uv=False)
        assert np.abs(overlap - 1.0).max() < 1e-10


def test_parameter_validation():
    pc = dg.PointCloud(np.random.default_rng(0).standard_normal((30, 3)))
    with pytest.raises(InputError):
        dg.lpca_tangent(pc, 1, 2)  # k < d + 1
    with pytest.raises(InputError):
        dg.lpca_tangent(pc, 30, 2)  # k > n - 1
    with pytest.raises(InputError):
        dg.lpca_tangent(pc, 5, 3)  # d must be < D


def test_torus_clean_accuracy(torus3000):
    pc, gt, _ = torus3000
    frames = dg.lpca_tangent(pc, 5, 2)
    assert dg.error_angle(frames, gt, pc) < 5.0


def test_torus_noisy_diffusion_beats_small_k():
    pc, gt = dg.sample(dg.suite_spec("torus"), 1000, seed=14)
    noisy = dg.add_gaussian_noise(pc, 0.05, seed=15)
    diff_angle = dg.error_angle(dg.estimate_geometry(noisy, d=2).frames, gt, noisy)
    lpca_angle = dg.error_angle(dg.lpca_tangent(noisy, 5, 2), gt, noisy)
    assert diff_angle < lpca_angle


def test_rotation_equivariance():
    pc, _ = dg.sample(dg.suite_spec("torus"), 500, seed=16)
    frames = dg.lpca_tangent(pc, 12, 2)
    rng = dg.substream(3, "rot")
    a = rng.standard_normal((3, 3))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    rotated = dg.lpca_tangent(dg.PointCloud(pc.points @ q.T), 12, 2)
    t_ref = np.einsum("ab,nbj->naj", q, frames.tangents)
    sv = np.linalg.svd(np.einsum("nai,naj->nij", rotated.tangents, t_ref), compute_uv=False)
    assert np.arccos(np.clip(sv, 0, 1)).max() < 1e-6
