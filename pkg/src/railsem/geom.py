"""Points, axis-aligned boxes and the box metrics shared by detection and topology."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np


class Point3(NamedTuple):
    x: float
    y: float
    z: float


class Orientation(enum.Enum):
    VERTICAL = "Vertical"
    HORIZONTAL = "Horizontal"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Aabb:
    min_corner: Point3
    max_corner: Point3

    def __post_init__(self):
        lo, hi = self.min_corner, self.max_corner
        if not all(math.isfinite(v) for v in (*lo, *hi)):
            raise ValueError("box corners must be finite")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"min corner {tuple(lo)} exceeds max corner {tuple(hi)}")
        object.__setattr__(self, "min_corner", Point3(*map(float, lo)))
        object.__setattr__(self, "max_corner", Point3(*map(float, hi)))

    @classmethod
    def from_center(cls, center: Sequence[float], dims: Sequence[float]) -> "Aabb":
        lo = [c - d / 2.0 for c, d in zip(center, dims)]
        hi = [c + d / 2.0 for c, d in zip(center, dims)]
        return cls(Point3(*lo), Point3(*hi))

    @property
    def extents(self) -> Point3:
        return Point3(*(b - a for a, b in zip(self.min_corner, self.max_corner)))

    @property
    def center(self) -> Point3:
        return Point3(*((a + b) / 2.0 for a, b in zip(self.min_corner, self.max_corner)))

    @property
    def diameter(self) -> float:
        return math.sqrt(sum(e * e for e in self.extents))

    @property
    def is_degenerate(self) -> bool:
        return any(e == 0.0 for e in self.extents)

    def contains(self, p: Sequence[float]) -> bool:
        return all(a <= v <= b for a, v, b in zip(self.min_corner, p, self.max_corner))

    def translated(self, offset: Sequence[float]) -> "Aabb":
        return Aabb(
            Point3(*(a + o for a, o in zip(self.min_corner, offset))),
            Point3(*(b + o for b, o in zip(self.max_corner, offset))),
        )

    def inflated(self, margin: float) -> "Aabb":
        return Aabb(
            Point3(*(a - margin for a in self.min_corner)),
            Point3(*(b + margin for b in self.max_corner)),
        )


def aabb_from_points(points) -> Aabb:
    """Tightest closed box around ``points`` (an (N, 3) array or a sequence of triples)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) == 0:
        raise ValueError("cannot box an empty point set")
    return Aabb(Point3(*pts.min(axis=0)), Point3(*pts.max(axis=0)))


def axis_gaps(a: Aabb, b: Aabb) -> tuple[float, float, float]:
    return tuple(
        max(0.0, a.min_corner[i] - b.max_corner[i], b.min_corner[i] - a.max_corner[i])
        for i in range(3)
    )


def gap_distance(a: Aabb, b: Aabb) -> float:
    """Euclidean distance between the closest points of two boxes (0 if they meet)."""
    return math.sqrt(sum(g * g for g in axis_gaps(a, b)))


def overlap_extents(a: Aabb, b: Aabb) -> tuple[float, float, float]:
    """Per-axis overlap length; negative values measure separation."""
    return tuple(
        min(a.max_corner[i], b.max_corner[i]) - max(a.min_corner[i], b.min_corner[i])
        for i in range(3)
    )


def classify_orientation(box: Aabb, ratio_threshold: float = 2.0, min_major_extent: float = 1.0) -> Orientation:
    if ratio_threshold <= 1:
        raise ValueError("ratio_threshold must exceed 1")
    ex, ey, ez = box.extents
    eh = max(ex, ey)
    if ez >= ratio_threshold * eh and ez >= min_major_extent:
        return Orientation.VERTICAL
    if eh >= ratio_threshold * ez and eh >= min_major_extent:
        return Orientation.HORIZONTAL
    return Orientation.UNDETERMINED


def dominant_axis(box: Aabb) -> int:
    """Index of the largest extent; ties resolve to the lower axis (x < y < z)."""
    ext = box.extents
    return max(range(3), key=lambda i: (ext[i], -i))
