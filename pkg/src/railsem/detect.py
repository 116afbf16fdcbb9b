"""3D-processing built-ins: voxel-connected clustering into boxed geometric elements.

The two generative built-ins ``VerticalElementDetection(?Vert, ?Dir)`` and
``HorizontalElementDetection(?Hor, ?Dir)`` take a Scene individual carrying
``hasPointCloudDirectory``.  The first call for a directory runs
load -> ground removal -> clustering and registers every element (plus the
ground slab) in the KB; later calls reuse the memo.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cloud import PointCloud, load_scene_dir, remove_ground, voxelize
from .geom import Aabb, Orientation, Point3, aabb_from_points, classify_orientation
from .kb import KnowledgeBase, Name, Var, N
from .rules.builtins import Behavior, BuiltinRegistry

log = logging.getLogger(__name__)

_NEIGHBORS = [
    (dx, dy, dz)
    for dx in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dz in (-1, 0, 1)
    if (dx, dy, dz) != (0, 0, 0)
]

ORIENTATION_CLASS = {
    Orientation.VERTICAL: N("Vertical_BoundingBox"),
    Orientation.HORIZONTAL: N("Horizontal_BoundingBox"),
    Orientation.UNDETERMINED: N("Geometry"),
}

# data properties carrying a stored box: center + extents
BOX_PROPS = {
    "cx": N("hasCentroidX"), "cy": N("hasCentroidY"), "cz": N("hasCentroidZ"),
    "dx": N("hasWidth"), "dy": N("hasDepth"), "dz": N("hasHeight"),
}


class DetectionError(RuntimeError):
    pass


@dataclass(frozen=True)
class DetectionParams:
    voxel_resolution: float = 0.25
    min_points: int = 30
    ratio_threshold: float = 2.0
    min_major_extent: float = 1.0
    ground_slab: float = 0.30

    def __post_init__(self):
        if not (self.voxel_resolution > 0 and self.ratio_threshold > 1
                and self.min_major_extent > 0 and self.ground_slab > 0):
            raise ValueError(f"invalid detection parameters {self}")
        if self.min_points < 1:
            raise ValueError("min_points must be >= 1")


@dataclass(frozen=True)
class DetectedElement:
    id: Name
    box: Aabb
    orientation: Orientation
    point_count: int
    centroid: Point3
    point_indices: np.ndarray = field(repr=False, compare=False, default=None)


def connected_components(cells) -> list[list[tuple[int, int, int]]]:
    """26-connected components of a set of occupied voxel keys, in sorted-seed order."""
    remaining = set(cells)
    comps = []
    for seed in sorted(cells):
        if seed not in remaining:
            continue
        remaining.discard(seed)
        comp = [seed]
        queue = deque([seed])
        while queue:
            x, y, z = queue.popleft()
            for dx, dy, dz in _NEIGHBORS:
                nb = (x + dx, y + dy, z + dz)
                if nb in remaining:
                    remaining.discard(nb)
                    comp.append(nb)
                    queue.append(nb)
        comps.append(comp)
    return comps


def detect_elements(cloud: PointCloud, params: DetectionParams = DetectionParams(), first_id: int = 0) -> list[DetectedElement]:
    """Cluster ``cloud`` (ground already removed) into boxed elements.

    Elements are sorted by box center (x, y, z) and numbered ``geo_<k>``
    from ``first_id`` in that order.
    """
    if len(cloud) == 0:
        raise DetectionError("cannot detect elements in an empty cloud")
    grid = voxelize(cloud, params.voxel_resolution)
    found = []
    for comp in connected_components(grid.cells):
        idx = np.sort(np.concatenate([grid.cells[c] for c in comp]))
        if len(idx) < params.min_points:
            continue
        box = aabb_from_points(cloud.points[idx])
        orient = classify_orientation(box, params.ratio_threshold, params.min_major_extent)
        found.append((box, orient, idx))
    found.sort(key=lambda t: (t[0].center.x, t[0].center.y, t[0].center.z))
    return [
        DetectedElement(N(f"geo_{first_id + k}"), box, orient, len(idx), box.center, idx)
        for k, (box, orient, idx) in enumerate(found)
    ]


def store_box(kb: KnowledgeBase, ind: Name, box: Aabb) -> None:
    c, e = box.center, box.extents
    for key, val in zip(("cx", "cy", "cz", "dx", "dy", "dz"), (*c, *e)):
        kb.add(ind, BOX_PROPS[key], float(val))


def stored_box(kb: KnowledgeBase, ind: Name) -> Aabb | None:
    """Reconstruct the box of ``ind`` from its data properties (None if incomplete)."""
    vals = {}
    for key, prop in BOX_PROPS.items():
        v = kb.value(ind, prop)
        if not isinstance(v, float):
            return None
        vals[key] = v
    return Aabb.from_center(
        (vals["cx"], vals["cy"], vals["cz"]), (vals["dx"], vals["dy"], vals["dz"])
    )


@dataclass
class SceneDetection:
    directory: str
    elements: list[DetectedElement]
    ground: Name
    ground_box: Aabb


class ElementDetector:
    """Memoizing runner behind the 3D-processing built-ins."""

    def __init__(self, params: DetectionParams = DetectionParams()):
        self.params = params
        self.memo: dict[str, SceneDetection] = {}
        self.runs = 0

    def detect_directory(self, directory: str) -> SceneDetection:
        key = str(Path(directory))
        if key in self.memo:
            return self.memo[key]
        cloud = load_scene_dir(directory)
        ground, rest = remove_ground(cloud, self.params.ground_slab)
        first = sum(len(s.elements) for s in self.memo.values())
        elements = detect_elements(rest, self.params, first) if len(rest) else []
        gbox = aabb_from_points(ground.points)
        self.runs += 1
        log.info("detected %d elements in %s", len(elements), directory)
        result = SceneDetection(key, elements, N(f"ground_{len(self.memo)}"), gbox)
        self.memo[key] = result
        return result

    def register(self, kb: KnowledgeBase, scene: Name, det: SceneDetection) -> None:
        kb.add_type(det.ground, N("Ground"))
        store_box(kb, det.ground, det.ground_box)
        kb.add(scene, N("hasGeometry"), det.ground)
        for el in det.elements:
            kb.add_type(el.id, ORIENTATION_CLASS[el.orientation])
            store_box(kb, el.id, el.box)
            kb.add(el.id, N("hasPointCount"), float(el.point_count))
            kb.add(scene, N("hasGeometry"), el.id)

    def run(self, kb: KnowledgeBase, scene) -> SceneDetection:
        if not isinstance(scene, Name):
            raise DetectionError(f"scene argument must be a bound individual, got {scene}")
        directory = kb.value(scene, N("hasPointCloudDirectory"))
        if not isinstance(directory, str):
            raise DetectionError(f"scene {scene} has no hasPointCloudDirectory string")
        try:
            det = self.detect_directory(directory)
        except (OSError, ValueError) as exc:
            raise DetectionError(str(exc)) from exc
        self.register(kb, scene, det)
        return det

    def builtin(self, orientation: Orientation):
        def evaluate(kb, args):
            target, scene = args
            det = self.run(kb, scene)
            for el in det.elements:
                if el.orientation is orientation and (isinstance(target, Var) or target == el.id):
                    yield (el.id, scene)

        return evaluate


def register_builtins(reg: BuiltinRegistry, detector: ElementDetector) -> None:
    reg.add("3D_swrlb_Processing:VerticalElementDetection", [2], Behavior.GENERATIVE,
            detector.builtin(Orientation.VERTICAL), binds=[0])
    reg.add("3D_swrlb_Processing:HorizontalElementDetection", [2], Behavior.GENERATIVE,
            detector.builtin(Orientation.HORIZONTAL), binds=[0])
