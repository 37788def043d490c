"""Benchmark runner: dimension-accuracy tables, tangent error-angle grids,
and scalar-curvature MAE grids over (manifold, n, sigma) sweeps.

Each cell derives its own seed from the experiment seed and the cell labels,
so results are reproducible regardless of sweep order; a failure in one run
is recorded as an error row and never aborts the sweep.  Outputs are a
long-format CSV plus a JSON run manifest.
"""

import csv
import json
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__ as _version
from .errors import InputError
from .lpca import lpca_tangent
from .manifolds import ManifoldSpec, sample, suite_spec
from .pipeline import estimate_curvature, estimate_geometry
from .point_cloud import add_gaussian_noise
from .rng import derive_seed

DEFAULT_SIGMAS = (0.0, 0.025, 0.05, 0.1)


@dataclass(frozen=True)
class ExperimentConfig:
    """A benchmark sweep: manifolds x n values x noise levels x methods."""

    manifolds: tuple          # of (name, ManifoldSpec)
    n_values: tuple
    sigma_values: tuple = DEFAULT_SIGMAS
    runs: int = 10
    seed: int = 0
    methods: tuple = ("diffusion",)
    k: Optional[int] = None
    k0: int = 8
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.runs < 1:
            raise InputError(f"runs must be >= 1, got {self.runs}")
        if not self.manifolds:
            raise InputError("config lists no manifolds")
        if not self.n_values:
            raise InputError("config lists no n values")
        if any(n < 1 for n in self.n_values):
            raise InputError("all n values must be >= 1")
        if any(s < 0 for s in self.sigma_values):
            raise InputError("noise sigmas must be >= 0")
        for m in self.methods:
            _parse_method(m)

    @classmethod
    def from_dict(cls, obj):
        manifolds = []
        for entry in obj.get("manifolds", []):
            if isinstance(entry, str):
                manifolds.append((entry, suite_spec(entry)))
            elif isinstance(entry, dict):
                spec = ManifoldSpec(entry["kind"], entry.get("params") or {}, entry.get("ambient_D"))
                manifolds.append((entry.get("name", spec.kind), spec))
            else:
                raise InputError(f"bad manifold entry: {entry!r}")
        kwargs = {}
        for key in ("runs", "seed", "k", "k0", "epsilon"):
            if obj.get(key) is not None:
                kwargs[key] = obj[key]
        if obj.get("methods"):
            kwargs["methods"] = tuple(obj["methods"])
        if obj.get("sigma_values") is not None:
            kwargs["sigma_values"] = tuple(float(s) for s in obj["sigma_values"])
        return cls(
            manifolds=tuple(manifolds),
            n_values=tuple(int(n) for n in obj.get("n_values", [])),
            **kwargs,
        )

    @classmethod
    def from_json_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_dict(obj)

    def echo(self):
        return {
            "manifolds": [
                {"name": name, "kind": s.kind, "params": s.params, "ambient_D": s.ambient_D}
                for name, s in self.manifolds
            ],
            "n_values": list(self.n_values),
            "sigma_values": list(self.sigma_values),
            "runs": self.runs,
            "seed": self.seed,
            "methods": list(self.methods),
            "k": self.k,
            "k0": self.k0,
            "epsilon": self.epsilon,
        }


def _parse_method(method):
    if method == "diffusion":
        return ("diffusion", None)
    if method.startswith("lpca:"):
        try:
            return ("lpca", int(method.split(":", 1)[1]))
        except ValueError:
            raise InputError(f"bad LPCA method spec {method!r}; use 'lpca:<k>'") from None
    raise InputError(f"unknown method {method!r}; use 'diffusion' or 'lpca:<k>'")


@dataclass(frozen=True)
class ResultRow:
    manifold: str
    n: int
    sigma: float
    method: str
    metric: str
    mean: float
    std: float
    runs: int


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["manifold", "n", "sigma", "method", "metric", "mean", "std", "runs"])
            for r in self.rows:
                writer.writerow([
                    r.manifold, r.n, f"{r.sigma:.17g}", r.method, r.metric,
                    f"{r.mean:.17g}", f"{r.std:.17g}", r.runs,
                ])

    @classmethod
    def from_csv(cls, path):
        rows = []
        with open(path, "r", encoding="utf-8", newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.append(ResultRow(
                    manifold=rec["manifold"], n=int(rec["n"]), sigma=float(rec["sigma"]),
                    method=rec["method"], metric=rec["metric"], mean=float(rec["mean"]),
                    std=float(rec["std"]), runs=int(rec["runs"]),
                ))
        return cls(rows)

    def cell(self, **match):
        """The unique row matching the given field values."""
        hits = [
            r for r in self.rows
            if all(getattr(r, key) == val for key, val in match.items())
        ]
        if len(hits) != 1:
            raise InputError(f"expected exactly one row matching {match}, found {len(hits)}")
        return hits[0]


def error_angle(est, gt, pc):
    """Mean angle (degrees, folded to [0, 90]) between estimated and true
    normals, the latter taken at the nearest manifold point."""
    if gt.normal_at is None:
        raise InputError("ground truth provides no normal field (not a hypersurface)")
    if est.codim != 1:
        raise InputError(f"error angle needs codimension-1 frames, got codimension {est.codim}")
    true_n = gt.normal_at(gt.project(pc.points))
    est_n = est.normals[:, :, 0]
    cosang = np.clip(np.abs((est_n * true_n).sum(axis=1)), 0.0, 1.0)
    return float(np.degrees(np.arccos(cosang)).mean())


def curvature_mae(est_scalar, gt, pc):
    """Mean absolute error of estimated scalar curvature against the oracle
    evaluated at the nearest manifold points."""
    if gt.scalar_at is None:
        raise InputError("ground truth provides no scalar curvature oracle")
    truth = gt.scalar_at(gt.project(pc.points))
    est_scalar = np.asarray(est_scalar, dtype=float)
    if est_scalar.shape != truth.shape:
        raise InputError(f"scalar estimate has shape {est_scalar.shape}, expected {truth.shape}")
    return float(np.abs(est_scalar - truth).mean())


def _cell_cloud(spec, name, n, sigma, run, cfg):
    seed = derive_seed(cfg.seed, name, n, sigma, run)
    pc, gt = sample(spec, n, seed)
    if sigma > 0:
        pc = add_gaussian_noise(pc, sigma, seed)
    return pc, gt


def _sweep(cfg, cell_fn, metric):
    """Run cell_fn over the full grid, aggregating per-run values into rows."""
    table = ResultTable()
    for name, spec in cfg.manifolds:
        for n in cfg.n_values:
            for sigma in cfg.sigma_values:
                per_method = {}
                errors = {}
                for run in range(cfg.runs):
                    try:
                        pc, gt = _cell_cloud(spec, name, n, sigma, run, cfg)
                        outcomes = cell_fn(pc, gt, spec)
                    except Exception as exc:  # record, never abort the sweep
                        for method in cfg.methods:
                            errors.setdefault(method, []).append(f"run {run}: {exc}")
                        continue
                    for method, value in outcomes.items():
                        if isinstance(value, Exception):
                            errors.setdefault(method, []).append(f"run {run}: {value}")
                        else:
                            per_method.setdefault(method, []).append(value)
                for method in cfg.methods:
                    vals = per_method.get(method, [])
                    if vals:
                        table.rows.append(ResultRow(
                            manifold=name, n=n, sigma=sigma, method=method, metric=metric,
                            mean=float(np.mean(vals)), std=float(np.std(vals)), runs=len(vals),
                        ))
                    if method in errors:
                        table.rows.append(ResultRow(
                            manifold=name, n=n, sigma=sigma, method=method, metric="run_errors",
                            mean=float(len(errors[method])), std=0.0, runs=cfg.runs,
                        ))
    return table


def run_dimension_bench(cfg):
    """Dimension accuracy per cell: percent of runs with a correct global
    dimension estimate (std over the 0/100 run indicators)."""

    def cell(pc, gt, spec):
        geo = estimate_geometry(pc, k=cfg.k, k0=cfg.k0, epsilon=cfg.epsilon)
        return {"diffusion": 100.0 * float(geo.d_hat == gt.dim)}

    return _sweep(cfg, cell, "dimension_accuracy")


def run_tangent_grid(cfg):
    """Mean tangent error angle per cell for each configured method.

    The manifold's true dimension fixes the tangent rank for every method,
    mirroring the comparison protocol; only hypersurfaces are meaningful
    here.
    """

    def cell(pc, gt, spec):
        out = {}
        for method in cfg.methods:
            kind, karg = _parse_method(method)
            try:
                if kind == "diffusion":
                    geo = estimate_geometry(pc, k=cfg.k, k0=cfg.k0, epsilon=cfg.epsilon, d=gt.dim)
                    out[method] = error_angle(geo.frames, gt, pc)
                else:
                    out[method] = error_angle(lpca_tangent(pc, karg, gt.dim), gt, pc)
            except Exception as exc:
                out[method] = exc
        return out

    return _sweep(cfg, cell, "error_angle_deg")


def run_curvature_grid(cfg):
    """Mean absolute scalar-curvature error per cell (diffusion method)."""

    def cell(pc, gt, spec):
        cur = estimate_curvature(pc, k=cfg.k, k0=cfg.k0, epsilon=cfg.epsilon, d=gt.dim)
        return {"diffusion": curvature_mae(cur.scalar, gt, pc)}

    return _sweep(cfg, cell, "curvature_mae")


BENCH_TASKS = {
    "dim": run_dimension_bench,
    "tangent": run_tangent_grid,
    "curvature": run_curvature_grid,
}


def run_bench(task, cfg, out_csv=None, manifest_path=None):
    """Run one benchmark task, optionally writing the CSV and a manifest."""
    if task not in BENCH_TASKS:
        raise InputError(f"unknown bench task {task!r}; known: {sorted(BENCH_TASKS)}")
    started = time.time()
    table = BENCH_TASKS[task](cfg)
    elapsed = time.time() - started
    if out_csv is not None:
        table.to_csv(out_csv)
    if manifest_path is not None:
        manifest = {
            "task": task,
            "config": cfg.echo(),
            "version": _version,
            "elapsed_seconds": elapsed,
            "rows": len(table.rows),
            "output": str(out_csv) if out_csv else None,
        }
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
    return table
