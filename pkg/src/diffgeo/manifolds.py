"""Samplers for the synthetic test manifolds, with ground-truth oracles.

Each manifold kind provides uniform (surface-area / arclength) sampling via
rejection on parameter space, plus oracle maps for evaluation: the true
dimension, the unit normal field (hypersurfaces only), the scalar curvature
where a closed form exists, and nearest-point projection.

Supported kinds and parameters:

    circle            radius
    sphere            d (1..3), radius
    torus_revolution  r, R  (tube and centre radii, 0 < r < R)
    flat_torus        d (2 or 3): product of d unit circles in R^{2d}
    swiss_roll        t_min, t_max, height
    hyperboloid       z_max  (one sheet of x^2 + y^2 - z^2 = 1)
    mobius_strip      twists (>= 1), half_width
    helix             turns (>= 1), tube  (toroidal helix winding a circle)
"""

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InputError, NumericalError
from .point_cloud import PointCloud
from .rng import substream

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ManifoldSpec:
    """A manifold kind plus its parameters and ambient dimension."""

    kind: str
    params: dict = field(default_factory=dict)
    ambient_D: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown manifold kind {self.kind!r}; known: {sorted(_KINDS)}")
        merged = dict(_KINDS[self.kind].defaults)
        for key in self.params:
            if key not in merged:
                raise InputError(f"{self.kind}: unknown parameter {key!r}")
        merged.update(self.params)
        _KINDS[self.kind].validate(merged)
        object.__setattr__(self, "params", merged)
        min_D = _KINDS[self.kind].min_ambient(merged)
        if self.ambient_D is None:
            object.__setattr__(self, "ambient_D", min_D)
        elif self.ambient_D < min_D:
            raise InputError(
                f"{self.kind}: ambient_D={self.ambient_D} below minimal embedding dimension {min_D}"
            )

    @property
    def dim(self):
        return _KINDS[self.kind].dim(self.params)

    def to_json(self):
        return json.dumps({"kind": self.kind, "params": self.params, "ambient_D": self.ambient_D})

    @classmethod
    def from_json(cls, text):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid manifold spec JSON: {exc}") from None
        if not isinstance(obj, dict) or "kind" not in obj:
            raise InputError("manifold spec JSON must be an object with a 'kind' field")
        return cls(obj["kind"], obj.get("params") or {}, obj.get("ambient_D"))


@dataclass(frozen=True)
class GroundTruth:
    """Oracle bundle for a synthetic manifold.

    ``project`` maps ambient points (m, D) to nearest surface points.
    ``normal_at`` maps surface points to unit normals (hypersurfaces only,
    None otherwise).  ``scalar_at`` maps surface points to the scalar
    curvature (None where no closed form is implemented).
    """

    dim: int
    project: Callable
    normal_at: Optional[Callable] = None
    scalar_at: Optional[Callable] = None


def torus_scalar_curvature(phi, r, R):
    """Scalar curvature of the torus of revolution at internal angle phi:
    2 cos(phi) / (r (R + r cos phi))."""
    if not 0 < r < R:
        raise InputError(f"need 0 < r < R, got r={r}, R={R}")
    phi = np.asarray(phi, dtype=float)
    return 2.0 * np.cos(phi) / (r * (R + r * np.cos(phi)))


def sample(spec, n, seed, uniform_params=False):
    """Draw n points from the manifold, uniform w.r.t. surface measure.

    Rejection sampling on parameter space weights by the area element so the
    sample is area-uniform; ``uniform_params=True`` skips the weighting and
    samples parameters uniformly instead (useful for probing density
    independence of downstream estimators).  Deterministic given ``seed``.

    Returns (PointCloud, GroundTruth).
    """
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    kind = _KINDS[spec.kind]
    rng = substream(seed, "sample", spec.kind)
    points = kind.sample(spec.params, n, rng, uniform_params)
    if spec.ambient_D > points.shape[1]:
        points = np.hstack([points, np.zeros((n, spec.ambient_D - points.shape[1]))])
    meta = {
        "generator": spec.kind,
        "params": dict(spec.params),
        "seed": int(seed),
        "uniform_params": bool(uniform_params),
    }
    return PointCloud(points, meta=meta), ground_truth(spec)


def ground_truth(spec):
    """Build the oracle bundle for a spec (independent of any sample)."""
    kind = _KINDS[spec.kind]
    base_D = kind.min_ambient(spec.params)
    gt = kind.oracle(spec.params)
    if spec.ambient_D == base_D:
        return gt

    # zero-padded embedding: project through the core coordinates; the
    # normal field is dropped (the padded manifold is no longer a
    # hypersurface).
    pad = spec.ambient_D - base_D

    def project(q):
        core = gt.project(np.asarray(q, dtype=float)[:, :base_D])[:, :base_D]
        return np.hstack([core, np.zeros((core.shape[0], pad))])

    scalar_at = None
    if gt.scalar_at is not None:
        def scalar_at(x):
            return gt.scalar_at(np.asarray(x, dtype=float)[:, :base_D])

    return GroundTruth(gt.dim, project, None, scalar_at)


def project_to_manifold(gt, q):
    """Nearest surface point(s) for ambient query points q (m, D) or (D,)."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if not np.isfinite(q).all():
        raise InputError("query points contain NaN or Inf")
    return gt.project(q)


# ---------------------------------------------------------------------------
# rejection sampling helper

def _rejection(rng, n, draw, weight, bound):
    """Accumulate n accepted parameter draws with acceptance weight/bound."""
    out = []
    got = 0
    while got < n:
        m = max(2 * (n - got), 64)
        cand = draw(rng, m)
        w = weight(cand)
        keep = rng.random(m) * bound <= w
        acc = cand[..., keep] if cand.ndim > 1 else cand[keep]
        out.append(acc)
        got += acc.shape[-1]
    cat = np.concatenate(out, axis=-1)
    return cat[..., :n] if cat.ndim > 1 else cat[:n]


def _grid_refine_project(q, param_to_point, grids):
    """Generic nearest-parameter search: dense grid then local 1-d refinement.

    ``grids`` is a list of 1-d parameter grids (outer product is scanned).
    Refinement runs coordinate-wise bounded scalar minimisation around the
    best grid cell.  Good to ~1e-8 in parameter space.
    """
    meshes = np.meshgrid(*grids, indexing="ij")
    flat = [m.ravel() for m in meshes]
    pts = param_to_point(*flat)  # (G, D)
    out = np.empty((q.shape[0], pts.shape[1]))
    steps = [g[1] - g[0] for g in grids]
    for i, qi in enumerate(q):
        best = np.argmin(((pts - qi) ** 2).sum(axis=1))
        params = [f[best] for f in flat]
        for _ in range(3):  # alternate coordinate refinement
            for axis in range(len(grids)):
                def obj(t, axis=axis, params=params):
                    trial = list(params)
                    trial[axis] = t
                    p = param_to_point(*[np.array([v]) for v in trial])[0]
                    return float(((p - qi) ** 2).sum())

                lo = params[axis] - steps[axis]
                hi = params[axis] + steps[axis]
                res = minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                                      options={"xatol": 1e-10})
                params[axis] = float(res.x)
        out[i] = param_to_point(*[np.array([v]) for v in params])[0]
    return out


# ---------------------------------------------------------------------------
# per-kind implementations


class _Kind:
    defaults: dict = {}

    def validate(self, p):
        pass

    def dim(self, p):
        raise NotImplementedError

    def min_ambient(self, p):
        raise NotImplementedError

    def sample(self, p, n, rng, uniform_params):
        raise NotImplementedError

    def oracle(self, p):
        raise NotImplementedError


class _Circle(_Kind):
    defaults = {"radius": 1.0}

    def validate(self, p):
        if p["radius"] <= 0:
            raise InputError("circle: radius must be > 0")

    def dim(self, p):
        return 1

    def min_ambient(self, p):
        return 2

    def sample(self, p, n, rng, uniform_params):
        theta = rng.uniform(0.0, _TWO_PI, n)  # arclength-uniform already
        r = p["radius"]
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    def oracle(self, p):
        r = p["radius"]

        def project(q):
            norms = np.linalg.norm(q[:, :2], axis=1)
            if np.any(norms == 0):
                raise NumericalError("projection ambiguous at the circle centre")
            out = np.zeros_like(q)
            out[:, :2] = r * q[:, :2] / norms[:, None]
            return out

        def normal_at(x):
            return x / np.linalg.norm(x, axis=1, keepdims=True)

        def scalar_at(x):
            return np.zeros(x.shape[0])

        return GroundTruth(1, project, normal_at, scalar_at)


class _Sphere(_Kind):
    defaults = {"d": 2, "radius": 1.0}

    def validate(self, p):
        if int(p["d"]) != p["d"] or not 1 <= p["d"] <= 3:
            raise InputError("sphere: d must be an integer in 1..3")
        if p["radius"] <= 0:
            raise InputError("sphere: radius must be > 0")

    def dim(self, p):
        return int(p["d"])

    def min_ambient(self, p):
        return int(p["d"]) + 1

    def sample(self, p, n, rng, uniform_params):
        d, r = int(p["d"]), p["radius"]
        g = rng.standard_normal((n, d + 1))
        return r * g / np.linalg.norm(g, axis=1, keepdims=True)

    def oracle(self, p):
        d, r = int(p["d"]), p["radius"]

        def project(q):
            norms = np.linalg.norm(q[:, : d + 1], axis=1)
            if np.any(norms == 0):
                raise NumericalError("projection ambiguous at the sphere centre")
            out = np.zeros_like(q)
            out[:, : d + 1] = r * q[:, : d + 1] / norms[:, None]
            return out

        def normal_at(x):
            return x / np.linalg.norm(x, axis=1, keepdims=True)

        def scalar_at(x):
            return np.full(x.shape[0], d * (d - 1) / r**2)

        return GroundTruth(d, project, normal_at, scalar_at)


class _TorusRevolution(_Kind):
    defaults = {"r": 1.0, "R": 2.0}

    def validate(self, p):
        if not 0 < p["r"] < p["R"]:
            raise InputError("torus_revolution: need 0 < r < R")

    def dim(self, p):
        return 2

    def min_ambient(self, p):
        return 3

    @staticmethod
    def _embed(theta, phi, r, R):
        w = R + r * np.cos(phi)
        return np.column_stack([w * np.cos(theta), w * np.sin(theta), r * np.sin(phi)])

    @staticmethod
    def angles(x, r, R):
        """Recover (theta, phi) for points on (or near) the torus."""
        theta = np.arctan2(x[:, 1], x[:, 0])
        u = np.hypot(x[:, 0], x[:, 1]) - R
        phi = np.arctan2(x[:, 2], u)
        return theta, phi

    def sample(self, p, n, rng, uniform_params):
        r, R = p["r"], p["R"]
        theta = rng.uniform(0.0, _TWO_PI, n)
        if uniform_params:
            phi = rng.uniform(0.0, _TWO_PI, n)
        else:
            # area element dA = r (R + r cos phi) dphi dtheta
            phi = _rejection(
                rng, n,
                lambda g, m: g.uniform(0.0, _TWO_PI, m),
                lambda c: R + r * np.cos(c),
                R + r,
            )
        return self._embed(theta, phi, r, R)

    def oracle(self, p):
        r, R = p["r"], p["R"]

        def project(q):
            rad = np.hypot(q[:, 0], q[:, 1])
            if np.any(rad == 0):
                raise NumericalError("projection ambiguous on the torus axis")
            if np.any((np.abs(rad - R) < 1e-15) & (np.abs(q[:, 2]) < 1e-15)):
                raise NumericalError("projection ambiguous on the torus core circle")
            theta = np.arctan2(q[:, 1], q[:, 0])
            phi = np.arctan2(q[:, 2], rad - R)
            return self._embed(theta, phi, r, R)

        def normal_at(x):
            theta, phi = self.angles(x, r, R)
            return np.column_stack([
                np.cos(phi) * np.cos(theta),
                np.cos(phi) * np.sin(theta),
                np.sin(phi),
            ])

        def scalar_at(x):
            _, phi = self.angles(x, r, R)
            return torus_scalar_curvature(phi, r, R)

        return GroundTruth(2, project, normal_at, scalar_at)


class _FlatTorus(_Kind):
    defaults = {"d": 2}

    def validate(self, p):
        if int(p["d"]) != p["d"] or not 2 <= p["d"] <= 3:
            raise InputError("flat_torus: d must be 2 or 3")

    def dim(self, p):
        return int(p["d"])

    def min_ambient(self, p):
        return 2 * int(p["d"])

    def sample(self, p, n, rng, uniform_params):
        d = int(p["d"])
        # product of unit circles: parameter-uniform is already area-uniform
        ang = rng.uniform(0.0, _TWO_PI, (n, d))
        cols = []
        for j in range(d):
            cols += [np.cos(ang[:, j]), np.sin(ang[:, j])]
        return np.column_stack(cols)

    def oracle(self, p):
        d = int(p["d"])

        def project(q):
            out = np.zeros_like(q)
            for j in range(d):
                pair = q[:, 2 * j : 2 * j + 2]
                norms = np.linalg.norm(pair, axis=1)
                if np.any(norms == 0):
                    raise NumericalError("projection ambiguous on a factor-circle axis")
                out[:, 2 * j : 2 * j + 2] = pair / norms[:, None]
            return out

        def scalar_at(x):
            return np.zeros(x.shape[0])

        return GroundTruth(d, project, None, scalar_at)


class _SwissRoll(_Kind):
    defaults = {"t_min": 1.5 * math.pi, "t_max": 4.5 * math.pi, "height": 21.0}

    def validate(self, p):
        if not 0 < p["t_min"] < p["t_max"]:
            raise InputError("swiss_roll: need 0 < t_min < t_max")
        if p["height"] <= 0:
            raise InputError("swiss_roll: height must be > 0")

    def dim(self, p):
        return 2

    def min_ambient(self, p):
        return 3

    @staticmethod
    def _embed(t, y):
        return np.column_stack([t * np.cos(t), y, t * np.sin(t)])

    def sample(self, p, n, rng, uniform_params):
        t0, t1, h = p["t_min"], p["t_max"], p["height"]
        y = rng.uniform(0.0, h, n)
        if uniform_params:
            t = rng.uniform(t0, t1, n)
        else:
            # dA = sqrt(1 + t^2) dt dy
            t = _rejection(
                rng, n,
                lambda g, m: g.uniform(t0, t1, m),
                lambda c: np.sqrt(1.0 + c**2),
                math.sqrt(1.0 + t1**2),
            )
        return self._embed(t, y)

    def oracle(self, p):
        t0, t1, h = p["t_min"], p["t_max"], p["height"]

        def project(q):
            grid = np.linspace(t0, t1, 4096)

            def curve(t):
                return np.column_stack([t * np.cos(t), np.zeros_like(t), t * np.sin(t)])

            qxz = q.copy()
            qxz[:, 1] = 0.0
            best = _grid_refine_project(qxz, lambda t: curve(t), [grid])
            out = best
            out[:, 1] = np.clip(q[:, 1], 0.0, h)
            return out

        def normal_at(x):
            t = np.hypot(x[:, 0], x[:, 2])  # |(t cos t, t sin t)| = t
            s = np.sqrt(1.0 + t**2)
            return np.column_stack([
                -(np.sin(t) + t * np.cos(t)) / s,
                np.zeros_like(t),
                (np.cos(t) - t * np.sin(t)) / s,
            ])

        def scalar_at(x):
            return np.zeros(x.shape[0])

        return GroundTruth(2, project, normal_at, scalar_at)


class _Hyperboloid(_Kind):
    defaults = {"z_max": 1.0}

    def validate(self, p):
        if p["z_max"] <= 0:
            raise InputError("hyperboloid: z_max must be > 0")

    def dim(self, p):
        return 2

    def min_ambient(self, p):
        return 3

    @staticmethod
    def _embed(psi, z):
        r = np.sqrt(1.0 + z**2)
        return np.column_stack([r * np.cos(psi), r * np.sin(psi), z])

    def sample(self, p, n, rng, uniform_params):
        zm = p["z_max"]
        psi = rng.uniform(0.0, _TWO_PI, n)
        if uniform_params:
            z = rng.uniform(-zm, zm, n)
        else:
            # dA = r sqrt(1 + r'^2) dpsi dz = sqrt(1 + 2 z^2) dpsi dz
            z = _rejection(
                rng, n,
                lambda g, m: g.uniform(-zm, zm, m),
                lambda c: np.sqrt(1.0 + 2.0 * c**2),
                math.sqrt(1.0 + 2.0 * zm**2),
            )
        return self._embed(psi, z)

    def oracle(self, p):
        zm = p["z_max"]

        def project(q):
            rad = np.hypot(q[:, 0], q[:, 1])
            if np.any(rad == 0):
                raise NumericalError("projection ambiguous on the hyperboloid axis")
            psi = np.arctan2(q[:, 1], q[:, 0])
            out = np.empty_like(q)
            for i in range(q.shape[0]):
                def obj(z, i=i):
                    return (rad[i] - math.sqrt(1.0 + z * z)) ** 2 + (q[i, 2] - z) ** 2

                res = minimize_scalar(obj, bounds=(-zm, zm), method="bounded",
                                      options={"xatol": 1e-12})
                out[i] = self._embed(np.array([psi[i]]), np.array([float(res.x)]))[0]
            return out

        def normal_at(x):
            # gradient of x^2 + y^2 - z^2
            g = np.column_stack([x[:, 0], x[:, 1], -x[:, 2]])
            return g / np.linalg.norm(g, axis=1, keepdims=True)

        def scalar_at(x):
            return -2.0 / (1.0 + 2.0 * x[:, 2] ** 2) ** 2

        return GroundTruth(2, project, normal_at, scalar_at)


class _MobiusStrip(_Kind):
    defaults = {"twists": 1, "half_width": 0.3}

    def validate(self, p):
        if int(p["twists"]) != p["twists"] or p["twists"] < 1:
            raise InputError("mobius_strip: twists must be an integer >= 1")
        if not 0 < p["half_width"] < 1:
            raise InputError("mobius_strip: half_width must be in (0, 1)")

    def dim(self, p):
        return 2

    def min_ambient(self, p):
        return 3

    @staticmethod
    def _embed(u, v, m):
        c, s = np.cos(m * u / 2.0), np.sin(m * u / 2.0)
        w = 1.0 + v * c
        return np.column_stack([w * np.cos(u), w * np.sin(u), v * s])

    @staticmethod
    def _partials(u, v, m):
        c, s = np.cos(m * u / 2.0), np.sin(m * u / 2.0)
        w = 1.0 + v * c
        half = m / 2.0
        du = np.column_stack([
            -w * np.sin(u) - v * half * s * np.cos(u),
            w * np.cos(u) - v * half * s * np.sin(u),
            v * half * c,
        ])
        dv = np.column_stack([c * np.cos(u), c * np.sin(u), s])
        return du, dv

    def sample(self, p, n, rng, uniform_params):
        m, hw = int(p["twists"]), p["half_width"]
        if uniform_params:
            u = rng.uniform(0.0, _TWO_PI, n)
            v = rng.uniform(-hw, hw, n)
        else:
            def area(cand):
                du, dv = self._partials(cand[0], cand[1], m)
                return np.linalg.norm(np.cross(du, dv), axis=1)

            # bound |du x dv| <= |du| |dv| with |dv| = 1
            bound = math.sqrt((1.0 + hw) ** 2 + (hw * m / 2.0) ** 2)
            uv = _rejection(
                rng, n,
                lambda g, k: np.stack([g.uniform(0.0, _TWO_PI, k), g.uniform(-hw, hw, k)]),
                area,
                bound,
            )
            u, v = uv[0], uv[1]
        return self._embed(u, v, m)

    def oracle(self, p):
        m, hw = int(p["twists"]), p["half_width"]

        def params_at(x):
            u = np.mod(np.arctan2(x[:, 1], x[:, 0]), _TWO_PI)
            c, s = np.cos(m * u / 2.0), np.sin(m * u / 2.0)
            rad = np.hypot(x[:, 0], x[:, 1])
            v = c * (rad - 1.0) + s * x[:, 2]
            return u, v

        def project(q):
            ug = np.linspace(0.0, _TWO_PI, 720, endpoint=False)
            vg = np.linspace(-hw, hw, 41)
            return _grid_refine_project(q, lambda u, v: self._embed(u, v, m), [ug, vg])

        def normal_at(x):
            u, v = params_at(x)
            du, dv = self._partials(u, v, m)
            nrm = np.cross(du, dv)
            return nrm / np.linalg.norm(nrm, axis=1, keepdims=True)

        return GroundTruth(2, project, normal_at, None)


class _Helix(_Kind):
    defaults = {"turns": 10, "tube": 0.25}

    def validate(self, p):
        if int(p["turns"]) != p["turns"] or p["turns"] < 1:
            raise InputError("helix: turns must be an integer >= 1")
        if not 0 < p["tube"] < 1:
            raise InputError("helix: tube must be in (0, 1)")

    def dim(self, p):
        return 1

    def min_ambient(self, p):
        return 3

    @staticmethod
    def _embed(u, k, a):
        c, s = np.cos(k * u), np.sin(k * u)
        w = 1.0 + a * c
        return np.column_stack([w * np.cos(u), w * np.sin(u), a * s])

    def sample(self, p, n, rng, uniform_params):
        k, a = int(p["turns"]), p["tube"]
        if uniform_params:
            u = rng.uniform(0.0, _TWO_PI, n)
        else:
            # |gamma'(u)|^2 = (1 + a cos ku)^2 + a^2 k^2
            u = _rejection(
                rng, n,
                lambda g, m: g.uniform(0.0, _TWO_PI, m),
                lambda c: np.sqrt((1.0 + a * np.cos(k * c)) ** 2 + a**2 * k**2),
                math.sqrt((1.0 + a) ** 2 + a**2 * k**2),
            )
        return self._embed(u, k, a)

    def oracle(self, p):
        k, a = int(p["turns"]), p["tube"]

        def project(q):
            grid = np.linspace(0.0, _TWO_PI, max(4096, 512 * k), endpoint=False)
            return _grid_refine_project(q, lambda u: self._embed(u, k, a), [grid])

        def scalar_at(x):
            return np.zeros(x.shape[0])

        return GroundTruth(1, project, None, scalar_at)


_KINDS = {
    "circle": _Circle(),
    "sphere": _Sphere(),
    "torus_revolution": _TorusRevolution(),
    "flat_torus": _FlatTorus(),
    "swiss_roll": _SwissRoll(),
    "hyperboloid": _Hyperboloid(),
    "mobius_strip": _MobiusStrip(),
    "helix": _Helix(),
}


# ---------------------------------------------------------------------------
# benchmark suite

#: Named specs of the 12-manifold benchmark suite: spheres and tori of
#: dimension 1..3, the hyperboloid, and re-implementations of the external
#: benchmark generators (swiss roll, twisted Mobius strips, wound helices).
BENCHMARK_SUITE = (
    ("circle", ManifoldSpec("circle")),
    ("sphere2", ManifoldSpec("sphere", {"d": 2})),
    ("sphere3", ManifoldSpec("sphere", {"d": 3})),
    ("torus", ManifoldSpec("torus_revolution")),
    ("flat_torus2", ManifoldSpec("flat_torus", {"d": 2})),
    ("flat_torus3", ManifoldSpec("flat_torus", {"d": 3})),
    ("swiss_roll", ManifoldSpec("swiss_roll")),
    ("hyperboloid", ManifoldSpec("hyperboloid")),
    ("mobius", ManifoldSpec("mobius_strip", {"twists": 1})),
    ("mobius10", ManifoldSpec("mobius_strip", {"twists": 10})),
    ("helix5", ManifoldSpec("helix", {"turns": 5})),
    ("helix20", ManifoldSpec("helix", {"turns": 20})),
)

#: (n_small, n_large) per intrinsic dimension.
BENCHMARK_SIZES = {1: (600, 1200), 2: (1200, 2400), 3: (2400, 4800)}


def suite_spec(name):
    """Look up a benchmark-suite spec by its short name."""
    for key, spec in BENCHMARK_SUITE:
        if key == name:
            return spec
    raise InputError(f"unknown suite manifold {name!r}; known: {[k for k, _ in BENCHMARK_SUITE]}")
