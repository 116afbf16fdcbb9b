"""Point-cloud ingest (ASCII XYZ), voxel grid and ground-slab separation."""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geom import Point3


class CloudFormatError(ValueError):
    pass


@dataclass
class PointCloud:
    points: np.ndarray
    source_path: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 3)

    def __len__(self):
        return len(self.points)

    def subset(self, mask_or_idx) -> "PointCloud":
        return PointCloud(self.points[mask_or_idx], self.source_path)


@dataclass
class VoxelGrid:
    resolution: float
    origin: Point3
    cells: dict[tuple[int, int, int], np.ndarray] = field(default_factory=dict)

    def cell_of(self, p) -> tuple[int, int, int]:
        return tuple(int(math.floor((v - o) / self.resolution)) for v, o in zip(p, self.origin))

    @property
    def population(self) -> int:
        return sum(len(v) for v in self.cells.values())


def _parse_lines(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) < 3:
                raise CloudFormatError(f"{path}:{lineno}: expected 3 coordinates, got {len(parts)}")
            try:
                xyz = [float(t) for t in parts[:3]]
            except ValueError:
                bad = next(t for t in parts[:3] if not _is_float(t))
                raise CloudFormatError(f"{path}:{lineno}: malformed coordinate {bad!r}") from None
            if not all(math.isfinite(v) for v in xyz):
                raise CloudFormatError(f"{path}:{lineno}: non-finite coordinate")
            rows.append(xyz)
    return np.array(rows, dtype=float).reshape(-1, 3)


def _is_float(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def load_xyz(path) -> PointCloud:
    """Read whitespace-separated ``x y z`` lines; ``#`` comments and blank lines are skipped."""
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    pts = None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pts = np.loadtxt(path, comments="#", usecols=(0, 1, 2), ndmin=2, dtype=float)
        if not np.isfinite(pts).all():
            pts = None
    except (ValueError, IndexError):
        pts = None
    if pts is None:
        # slow path pinpoints the offending line
        pts = _parse_lines(path)
    if len(pts) == 0:
        raise CloudFormatError(f"{path}: no points parsed")
    return PointCloud(pts, path)


def save_xyz(cloud: PointCloud, path) -> None:
    np.savetxt(path, cloud.points, fmt="%.6f", delimiter=" ")


def load_scene_dir(directory) -> PointCloud:
    """Concatenate every ``*.xyz`` file of a scene directory in lexicographic path order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"scene directory {directory} does not exist")
    files = sorted(directory.glob("*.xyz"), key=lambda p: str(p))
    parts = []
    for f in files:
        try:
            parts.append(load_xyz(f).points)
        except CloudFormatError as exc:
            if "no points parsed" not in str(exc):
                raise
    if not parts:
        raise CloudFormatError(f"{directory}: no parseable points in *.xyz files")
    return PointCloud(np.vstack(parts), str(directory))


def voxel_indices(points: np.ndarray, resolution: float, origin) -> np.ndarray:
    return np.floor((points - np.asarray(origin, dtype=float)) / resolution).astype(np.int64)


def voxelize(cloud: PointCloud, resolution: float) -> VoxelGrid:
    if not resolution > 0:
        raise ValueError("voxel resolution must be positive")
    if len(cloud) == 0:
        return VoxelGrid(resolution, Point3(0.0, 0.0, 0.0))
    origin = Point3(*cloud.points.min(axis=0))
    idx = voxel_indices(cloud.points, resolution, origin)
    keys, inverse = np.unique(idx, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[order], np.arange(len(keys) + 1))
    cells = {
        tuple(int(v) for v in keys[k]): order[bounds[k]:bounds[k + 1]]
        for k in range(len(keys))
    }
    return VoxelGrid(resolution, origin, cells)


def ground_slab(z: np.ndarray, slab_thickness: float) -> float:
    """Lower edge of the densest slab among those starting in the lowest quarter of the z-range."""
    zmin, zmax = float(z.min()), float(z.max())
    low_limit = zmin + 0.25 * (zmax - zmin)
    n_low = int(math.floor((low_limit - zmin) / slab_thickness)) + 1
    bins = np.floor((z - zmin) / slab_thickness).astype(np.int64)
    counts = np.bincount(bins[bins < n_low], minlength=n_low)
    return zmin + int(np.argmax(counts)) * slab_thickness


def remove_ground(cloud: PointCloud, slab_thickness: float = 0.30) -> tuple[PointCloud, PointCloud]:
    """Split ``cloud`` into (ground, rest); the ground is the densest low z-slab."""
    if len(cloud) == 0:
        raise ValueError("cannot extract ground from an empty cloud")
    if not slab_thickness > 0:
        raise ValueError("slab_thickness must be positive")
    z = cloud.points[:, 2]
    zm = ground_slab(z, slab_thickness)
    mask = (z >= zm) & (z <= zm + slab_thickness)
    return cloud.subset(mask), cloud.subset(~mask)
