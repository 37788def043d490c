"""Command-line interface.

Subcommands:

    sample      draw points from a synthetic manifold -> CSV
    dim         estimate dimension from a CSV cloud (per-point CSV optional)
    tangent     estimate tangent/normal frames -> CSV
    curvature   estimate scalar/Ricci (optionally Riemann) curvature -> CSV
    bench       run a benchmark sweep from a JSON config -> results CSV

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

import argparse
import json
import sys

import numpy as np

from .bench import ExperimentConfig, run_bench
from .errors import InputError, NumericalError
from .manifolds import ManifoldSpec, sample, suite_spec
from .pipeline import estimate_curvature, estimate_geometry
from .point_cloud import add_gaussian_noise, embed_isometric, load_csv, save_csv


def _manifold_arg(text):
    """A suite name like 'torus', or an inline JSON spec {kind, params, ...}."""
    text = text.strip()
    if text.startswith("{"):
        return ManifoldSpec.from_json(text)
    return suite_spec(text)


def _add_estimator_flags(p):
    p.add_argument("--k", type=int, default=None, help="neighbour count (default min(n-1, 128))")
    p.add_argument("--k0", type=int, default=8, help="bandwidth neighbour count")
    p.add_argument("--epsilon", type=float, default=None, help="kernel bandwidth (overrides auto-selection)")
    p.add_argument("--dim", type=int, default=None, help="intrinsic dimension (overrides the estimate)")


def build_parser():
    parser = argparse.ArgumentParser(prog="diffgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a synthetic manifold to CSV")
    p.add_argument("--manifold", required=True, type=_manifold_arg,
                   help="suite name (e.g. torus) or inline JSON spec")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=0.0, help="ambient Gaussian noise level")
    p.add_argument("--ambient", type=int, default=None,
                   help="re-embed isometrically into this ambient dimension")
    p.add_argument("--uniform-params", action="store_true",
                   help="sample parameters uniformly instead of area-uniformly")
    p.add_argument("--out", required=True)

    p = sub.add_parser("dim", help="estimate intrinsic dimension from a CSV cloud")
    p.add_argument("input")
    p.add_argument("--header", action="store_true", help="input has a header row")
    _add_estimator_flags(p)
    p.add_argument("--out", default=None, help="per-point CSV: index, d_hat, eigenvalues")

    p = sub.add_parser("tangent", help="estimate tangent/normal frames from a CSV cloud")
    p.add_argument("input")
    p.add_argument("--header", action="store_true")
    _add_estimator_flags(p)
    p.add_argument("--out", required=True, help="frames CSV: index, tangent then normal columns")

    p = sub.add_parser("curvature", help="estimate curvature from a CSV cloud")
    p.add_argument("input")
    p.add_argument("--header", action="store_true")
    _add_estimator_flags(p)
    p.add_argument("--riemann", action="store_true", help="include the flattened Riemann tensor")
    p.add_argument("--out", required=True, help="CSV: index, scalar, Ricci, [kappa], [Riemann]")

    p = sub.add_parser("bench", help="run a benchmark sweep from a JSON config")
    p.add_argument("task", choices=("dim", "tangent", "curvature"))
    p.add_argument("config", help="JSON experiment config")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True, help="results CSV path")
    p.add_argument("--manifest", default=None, help="run-manifest JSON path (default <out>.manifest.json)")
    return parser


def _cmd_sample(args):
    pc, _ = sample(args.manifold, args.n, args.seed, uniform_params=args.uniform_params)
    if args.ambient is not None:
        pc = embed_isometric(pc, args.ambient, args.seed)
    if args.sigma > 0:
        pc = add_gaussian_noise(pc, args.sigma, args.seed)
    save_csv(pc, args.out)
    print(f"wrote {pc.n} points in R^{pc.D} to {args.out}")
    return 0


def _cmd_dim(args):
    pc = load_csv(args.input, has_header=args.header)
    geo = estimate_geometry(pc, k=args.k, k0=args.k0, epsilon=args.epsilon, d=args.dim)
    print(f"global_dimension: {geo.d_hat}")
    print(f"c_hat: {geo.c_hat:.6g}")
    print(f"epsilon: {geo.operator.epsilon:.6g}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            cols = ["index", "d_hat"] + [f"eig{j}" for j in range(pc.D)]
            fh.write(",".join(cols) + "\n")
            for i in range(pc.n):
                eigs = ",".join(f"{v:.17g}" for v in geo.metric.eigenvalues[i])
                fh.write(f"{i},{geo.dims[i]},{eigs}\n")
    return 0


def _frame_header(D, d):
    cols = ["index", "d"]
    cols += [f"t{j}_{b}" for j in range(d) for b in range(D)]
    cols += [f"n{j}_{b}" for j in range(D - d) for b in range(D)]
    return cols


def _write_frames(path, frames, dims=None):
    n, D, d = frames.n, frames.D, frames.d
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(_frame_header(D, d)) + "\n")
        for i in range(n):
            vals = [str(i), str(d if dims is None else dims[i])]
            vals += [f"{v:.17g}" for v in frames.tangents[i].T.ravel()]
            vals += [f"{v:.17g}" for v in frames.normals[i].T.ravel()]
            fh.write(",".join(vals) + "\n")


def _cmd_tangent(args):
    pc = load_csv(args.input, has_header=args.header)
    geo = estimate_geometry(pc, k=args.k, k0=args.k0, epsilon=args.epsilon, d=args.dim)
    _write_frames(args.out, geo.frames)
    print(f"global_dimension: {geo.d_hat}")
    print(f"wrote frames (d={geo.frames.d}) for {pc.n} points to {args.out}")
    return 0


def _cmd_curvature(args):
    pc = load_csv(args.input, has_header=args.header)
    cur = estimate_curvature(pc, k=args.k, k0=args.k0, epsilon=args.epsilon, d=args.dim,
                             with_riemann=args.riemann)
    d = cur.alpha.d
    with open(args.out, "w", encoding="utf-8") as fh:
        cols = ["index", "scalar"]
        cols += [f"ric{i}_{j}" for i in range(d) for j in range(d)]
        if cur.gaussian is not None:
            cols.append("kappa")
        if args.riemann:
            cols += [f"r{i}_{j}_{k}_{l}" for i in range(d) for j in range(d)
                     for k in range(d) for l in range(d)]
        fh.write(",".join(cols) + "\n")
        for p in range(pc.n):
            vals = [str(p), f"{cur.scalar[p]:.17g}"]
            vals += [f"{v:.17g}" for v in cur.ricci[p].ravel()]
            if cur.gaussian is not None:
                vals.append(f"{cur.gaussian[p]:.17g}")
            if args.riemann:
                vals += [f"{v:.17g}" for v in cur.riemann[p].ravel()]
            fh.write(",".join(vals) + "\n")
    print(f"global_dimension: {cur.geometry.d_hat}")
    print(f"wrote curvature (d={d}) for {pc.n} points to {args.out}")
    return 0


def _cmd_bench(args):
    cfg = ExperimentConfig.from_json_file(args.config)
    if args.seed is not None:
        cfg = ExperimentConfig(
            manifolds=cfg.manifolds, n_values=cfg.n_values, sigma_values=cfg.sigma_values,
            runs=cfg.runs, seed=args.seed, methods=cfg.methods, k=cfg.k, k0=cfg.k0,
            epsilon=cfg.epsilon,
        )
    manifest = args.manifest if args.manifest else args.out + ".manifest.json"
    table = run_bench(args.task, cfg, out_csv=args.out, manifest_path=manifest)
    print(f"wrote {len(table.rows)} result rows to {args.out}")
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "dim": _cmd_dim,
    "tangent": _cmd_tangent,
    "curvature": _cmd_curvature,
    "bench": _cmd_bench,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
