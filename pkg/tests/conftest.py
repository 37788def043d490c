"""Shared fixtures: sampled clouds with fitted pipelines, reused across
modules to keep the suite fast."""

import numpy as np
import pytest

import diffgeo as dg


@pytest.fixture(scope="session")
def circle2000():
    pc, gt = dg.sample(dg.ManifoldSpec("circle"), 2000, seed=7)
    geo = dg.estimate_geometry(pc)
    return pc, gt, geo


@pytest.fixture(scope="session")
def sphere3000():
    pc, gt = dg.sample(dg.ManifoldSpec("sphere", {"d": 2}), 3000, seed=3)
    geo = dg.estimate_geometry(pc)
    return pc, gt, geo


@pytest.fixture(scope="session")
def torus3000():
    pc, gt = dg.sample(dg.ManifoldSpec("torus_revolution"), 3000, seed=5)
    geo = dg.estimate_geometry(pc)
    return pc, gt, geo


@pytest.fixture(scope="session")
def torus_curvature(torus3000):
    pc, gt, _ = torus3000
    return pc, gt, dg.estimate_curvature(pc)


@pytest.fixture(scope="session")
def square4000():
    rng = dg.substream(42, "square")
    pc = dg.PointCloud(rng.uniform(0.0, 1.0, (4000, 2)))
    geo = dg.estimate_geometry(pc)
    return pc, geo


def interior_mask(pc, margin=0.15):
    return np.all((pc.points > margin) & (pc.points < 1.0 - margin), axis=1)
