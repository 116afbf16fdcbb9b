"""Synthetic railway scenes: surface-sampled boxes on a ground strip, with ground truth."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .cloud import PointCloud, save_xyz
from .geom import Aabb
from .topo import intersect


class SceneSpecError(ValueError):
    pass


@dataclass
class SceneObject:
    cls: str
    center: tuple[float, float, float]
    dims: tuple[float, float, float]
    id: str = ""

    @property
    def box(self) -> Aabb:
        return Aabb.from_center(self.center, self.dims)


@dataclass
class GroundSpec:
    extent: tuple[float, float, float, float] = (0.0, 500.0, -4.0, 6.0)  # xmin, xmax, ymin, ymax
    z: float = 0.0
    points_per_m2: float = 20.0


@dataclass
class SceneSpec:
    length_m: float = 500.0
    objects: list[SceneObject] = field(default_factory=list)
    ground: GroundSpec = field(default_factory=GroundSpec)
    points_per_m2: float = 400.0
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for i, obj in enumerate(self.objects):
            if not obj.id:
                obj.id = f"obj_{i}"

    def validate(self) -> None:
        if self.points_per_m2 <= 0 or self.ground.points_per_m2 <= 0:
            raise SceneSpecError("point densities must be positive")
        if self.noise_sigma < 0 or self.length_m <= 0:
            raise SceneSpecError("noise_sigma must be >= 0 and length_m > 0")
        xmin, xmax, ymin, ymax = self.ground.extent
        if not (xmin < xmax and ymin < ymax):
            raise SceneSpecError(f"empty ground extent {self.ground.extent}")
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise SceneSpecError("object ids must be unique")
        for o in self.objects:
            if any(d <= 0 for d in o.dims):
                raise SceneSpecError(f"object {o.id} has non-positive dims {o.dims}")
            b = o.box
            if b.min_corner.x < 0 or b.max_corner.x > self.length_m:
                raise SceneSpecError(f"object {o.id} lies outside the scene length [0, {self.length_m}]")
            if b.min_corner.y < ymin or b.max_corner.y > ymax:
                raise SceneSpecError(f"object {o.id} lies outside the ground strip y in [{ymin}, {ymax}]")
        clashes = [
            f"{a.id}/{b.id}"
            for i, a in enumerate(self.objects)
            for b in self.objects[i + 1:]
            if intersect(a.box, b.box)
        ]
        if clashes:
            raise SceneSpecError("overlapping object boxes: " + ", ".join(clashes))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["objects"] = [
            {"id": o.id, "class": o.cls, "center": list(o.center), "dims": list(o.dims)}
            for o in self.objects
        ]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSpec":
        try:
            objects = [
                SceneObject(o["class"], tuple(map(float, o["center"])), tuple(map(float, o["dims"])), o.get("id", ""))
                for o in d.get("objects", [])
            ]
            g = d.get("ground", {})
            ground = GroundSpec(
                tuple(map(float, g.get("extent", GroundSpec.extent))),
                float(g.get("z", 0.0)),
                float(g.get("points_per_m2", GroundSpec.points_per_m2)),
            )
            return cls(
                float(d.get("length_m", 500.0)), objects, ground,
                float(d.get("points_per_m2", 400.0)), float(d.get("noise_sigma", 0.0)), int(d.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneSpecError(f"malformed scene spec: {exc}") from exc


@dataclass
class TruthObject:
    id: str
    cls: str
    box: Aabb
    start: int
    end: int


@dataclass
class GroundTruth:
    objects: list[TruthObject]
    ground_range: tuple[int, int]

    def to_json(self) -> str:
        return json.dumps({
            "objects": [
                {"id": o.id, "class": o.cls,
                 "min": list(o.box.min_corner), "max": list(o.box.max_corner),
                 "points": [o.start, o.end]}
                for o in self.objects
            ],
            "ground_points": list(self.ground_range),
        }, indent=2) + "\n"


def sample_box_surface(rng: np.random.Generator, box: Aabb, density: float) -> np.ndarray:
    """Uniform samples on the six faces; each face gets round(area * density) points."""
    lo = np.array(box.min_corner)
    hi = np.array(box.max_corner)
    ext = hi - lo
    parts = []
    for axis in range(3):
        u, v = [a for a in range(3) if a != axis]
        n = int(round(ext[u] * ext[v] * density))
        for side in (lo[axis], hi[axis]):
            pts = np.empty((n, 3))
            pts[:, axis] = side
            pts[:, u] = lo[u] + rng.random(n) * ext[u]
            pts[:, v] = lo[v] + rng.random(n) * ext[v]
            parts.append(pts)
    return np.vstack(parts)


def surface_area(dims) -> float:
    dx, dy, dz = dims
    return 2.0 * (dx * dy + dx * dz + dy * dz)


def generate(spec: SceneSpec) -> tuple[PointCloud, GroundTruth]:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    parts, truth, n = [], [], 0
    for obj in spec.objects:
        pts = sample_box_surface(rng, obj.box, spec.points_per_m2)
        truth.append(TruthObject(obj.id, obj.cls, obj.box, n, n + len(pts)))
        parts.append(pts)
        n += len(pts)
    xmin, xmax, ymin, ymax = spec.ground.extent
    ng = int(round((xmax - xmin) * (ymax - ymin) * spec.ground.points_per_m2))
    ground = np.column_stack([
        xmin + rng.random(ng) * (xmax - xmin),
        ymin + rng.random(ng) * (ymax - ymin),
        np.full(ng, spec.ground.z),
    ])
    parts.append(ground)
    pts = np.vstack(parts)
    if spec.noise_sigma > 0:
        pts = pts + rng.normal(0.0, spec.noise_sigma, pts.shape)
    return PointCloud(pts, "<synthetic>"), GroundTruth(truth, (n, n + ng))


# Reference layout: 13 masts, 15 cabinets and three distant/main signal pairs
# whose along-track gaps are 1000, 995 and 1008 m.  No two candidates from
# different pairs come within 300 m of a one-kilometer spacing.
_MAST_DIMS = [(0.30, 0.30, 6.0), (0.35, 0.35, 6.5), (0.40, 0.30, 7.0), (0.30, 0.40, 7.5), (0.35, 0.35, 8.0)]
_CABINET_DIMS = [(1.2, 0.6, 1.6), (0.8, 0.8, 1.5), (1.5, 0.7, 1.8)]
_SIGNAL_DIMS = (0.35, 0.35, 3.5)
_SIGNAL_PAIRS = [(110.0, 1110.0), (420.0, 1415.0), (730.0, 1738.0)]


def reference_spec(noise_sigma: float = 0.0, seed: int = 0) -> SceneSpec:
    objects = []
    for i in range(13):
        d = _MAST_DIMS[i % len(_MAST_DIMS)]
        objects.append(SceneObject("Mast", (60.0 + 150.0 * i, 4.5, d[2] / 2), d, f"mast_{i}"))
    for i in range(15):
        d = _CABINET_DIMS[i % len(_CABINET_DIMS)]
        objects.append(SceneObject("Schaltanlage", (30.0 + 140.0 * i, -2.5, d[2] / 2), d, f"cabinet_{i}"))
    d = _SIGNAL_DIMS
    for k, (xd, xm) in enumerate(_SIGNAL_PAIRS):
        objects.append(SceneObject("DistantSignal", (xd, 2.5, d[2] / 2), d, f"distant_{k}"))
        objects.append(SceneObject("MainSignal", (xm, 2.5, d[2] / 2), d, f"main_{k}"))
    return SceneSpec(
        length_m=2200.0,
        objects=objects,
        ground=GroundSpec((0.0, 2200.0, -4.0, 6.0), 0.0, 20.0),
        points_per_m2=400.0,
        noise_sigma=noise_sigma,
        seed=seed,
    )


def load_spec(path) -> SceneSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SceneSpecError(f"{path}: invalid JSON: {exc}") from exc
    return SceneSpec.from_dict(data)


def write_scene(spec: SceneSpec, out_dir) -> tuple[Path, Path]:
    """Generate ``spec`` and write ``scene.xyz`` and ``truth.json`` into ``out_dir``."""
    cloud, truth = generate(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    xyz, tj = out / "scene.xyz", out / "truth.json"
    save_xyz(cloud, xyz)
    tj.write_text(truth.to_json(), encoding="utf-8")
    return xyz, tj
