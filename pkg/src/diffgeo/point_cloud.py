"""Point-cloud container, CSV interchange, noise injection, and re-embedding.

CSV is the canonical interchange format: rows are points, columns are
coordinates, '.' decimal, ',' separator, optional single header row.
Files are written with 17 significant digits so float64 round-trips exactly.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .rng import substream


@dataclass(frozen=True)
class PointCloud:
    """n points in ambient dimension D with stable row order.

    All per-point outputs downstream index by row.  ``meta`` carries
    provenance (generator name, parameters, seed, noise sigma) and is
    purely informational.  The coordinate array is made read-only so a
    cloud can be shared freely.
    """

    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2:
            raise InputError(f"points must be a 2-d array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InputError(f"need n >= 1 points and D >= 1 coordinates, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise InputError("points contain NaN or Inf")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def D(self):
        return self.points.shape[1]


def load_csv(path, has_header=False):
    """Read a point cloud from CSV.

    Parameters
    ----------
    path : str or Path
        File to read.
    has_header : bool
        Skip the first line.

    Raises
    ------
    InputError
        Empty file, ragged rows, or cells that do not parse as finite
        reals; messages cite the offending physical line number.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    start = 1 if has_header else 0
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        if lineno <= start:
            continue
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise InputError(
                f"{path}: line {lineno} has {len(cells)} columns, expected {width}"
            )
        try:
            row = [float(c) for c in cells]
        except ValueError:
            raise InputError(f"{path}: line {lineno} contains a non-numeric cell") from None
        if not all(np.isfinite(row)):
            raise InputError(f"{path}: line {lineno} contains a non-finite value")
        rows.append(row)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return PointCloud(np.array(rows, dtype=float), meta={"source": str(path)})


def save_csv(pc, path, header=False):
    """Write a point cloud as CSV with 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(",".join(f"x{a}" for a in range(pc.D)) + "\n")
        for row in pc.points:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def add_gaussian_noise(pc, sigma, seed):
    """Perturb every coordinate by an independent Gaussian(0, sigma^2) draw.

    Deterministic given ``seed``; sigma = 0 returns the input coordinates
    unchanged.
    """
    if sigma < 0:
        raise InputError(f"sigma must be >= 0, got {sigma}")
    noise = substream(seed, "noise").normal(0.0, sigma, size=pc.points.shape)
    meta = dict(pc.meta)
    meta.update(noise_sigma=float(sigma), noise_seed=int(seed))
    return PointCloud(pc.points + noise, meta=meta)


def embed_isometric(pc, target_D, seed):
    """Map the cloud into R^target_D by a seeded random orthogonal injection
    plus a random translation.  Pairwise distances are preserved to machine
    precision."""
    if target_D < pc.D:
        raise InputError(f"target_D={target_D} < ambient dimension {pc.D}")
    rng = substream(seed, "embed")
    a = rng.standard_normal((target_D, target_D))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))  # fix QR sign ambiguity
    basis = q[:, : pc.D]
    shift = rng.standard_normal(target_D)
    meta = dict(pc.meta)
    meta.update(embedded_from_D=pc.D, embed_seed=int(seed))
    return PointCloud(pc.points @ basis.T + shift, meta=meta)
