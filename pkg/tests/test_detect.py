import numpy as np
import pytest

from railsem.cloud import PointCloud, load_scene_dir, remove_ground, save_xyz
from railsem.detect import (
    DetectionError,
    DetectionParams,
    ElementDetector,
    detect_elements,
    stored_box,
)
from railsem.geom import Aabb, Orientation, classify_orientation
from railsem.kb import N, RDF_TYPE, Var
from railsem.pipeline import scene_kb
from railsem.rules import BuiltinRegistry, evaluate_body, parse_rules
from railsem.synth import sample_box_surface

MAST = ("Mast", (20.0, 0.0), (0.3, 0.3, 6.0))
BEAM = ("Beam", (20.0, 0.0), (6.0, 0.4, 0.4))


def blob(center, n, rng, spread=0.2):
    return np.asarray(center) + rng.uniform(-spread, spread, (n, 3))


def test_two_clusters():
    rng = np.random.default_rng(1)
    pts = np.vstack([blob((0, 0, 0), 100, rng), blob((10, 0, 0), 100, rng)])
    els = detect_elements(PointCloud(pts))
    assert len(els) == 2
    assert [e.id for e in els] == [N("geo_0"), N("geo_1")]
    assert els[0].box.center.x < els[1].box.center.x


def test_small_cluster_dropped():
    pts = blob((0, 0, 0), 10, np.random.default_rng(2))
    assert detect_elements(PointCloud(pts), DetectionParams(min_points=30)) == []


def test_empty_cloud_rejected():
    with pytest.raises(DetectionError):
        detect_elements(PointCloud(np.zeros((0, 3))))


def test_params_validated():
    with pytest.raises(ValueError):
        DetectionParams(min_points=0)
    with pytest.raises(ValueError):
        DetectionParams(voxel_resolution=-1)


def test_sparse_mast_on_cleared_ground():
    rng = np.random.default_rng(3)
    box = Aabb.from_center((0, 0, 3), (0.3, 0.3, 6.0))
    # density chosen for ~500 points over the 7.38 m^2 surface
    pts = sample_box_surface(rng, box, 500 / 7.38)
    assert abs(len(pts) - 500) < 10
    els = detect_elements(PointCloud(pts))
    assert len(els) == 1
    assert els[0].orientation is Orientation.VERTICAL
    assert els[0].point_count == len(pts)


def test_elements_are_disjoint_and_non_ground(scene_dir):
    d = scene_dir([MAST, ("Cab", (10.0, 1.0), (1.2, 0.6, 1.6))])
    cloud = load_scene_dir(d)
    _, rest = remove_ground(cloud)
    els = detect_elements(rest)
    seen = np.concatenate([e.point_indices for e in els])
    assert len(seen) == len(set(seen.tolist()))
    assert seen.max() < len(rest)
    for e in els:
        assert e.point_count >= 30 and e.box.contains(e.centroid)


def _run(kb, reg, text):
    rule = parse_rules(text + " -> Scene(?d)", reg)[0]
    return evaluate_body(kb, reg, rule.body)


def _setup(d):
    det = ElementDetector()
    return scene_kb(d), BuiltinRegistry.standard(det), det


def test_vertical_builtin_one_mast(scene_dir):
    kb, reg, det = _setup(scene_dir([MAST]))
    out = _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:VerticalElementDetection(?v, ?d)")
    assert [b["v"] for b in out] == [N("geo_0")]
    assert kb.individuals_of(N("Vertical_BoundingBox")) == [N("geo_0")]
    assert len(kb.individuals_of(N("Ground"))) == 1
    box = stored_box(kb, N("geo_0"))
    assert box.extents.z == pytest.approx(6.0, abs=0.35)
    assert kb.value(N("geo_0"), N("hasHeight")) == box.extents.z
    assert kb.value(N("geo_0"), N("hasPointCount")) > 30

    size = len(kb)
    again = _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:VerticalElementDetection(?v, ?d)")
    assert again == out
    assert len(kb) == size
    _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:HorizontalElementDetection(?h, ?d)")
    assert det.runs == 1


def test_ground_only_scene(scene_dir):
    kb, reg, _ = _setup(scene_dir([]))
    assert _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:VerticalElementDetection(?v, ?d)") == []
    assert len(kb.individuals_of(N("Ground"))) == 1


def test_horizontal_beam(tmp_path):
    rng = np.random.default_rng(4)
    ground = np.column_stack([rng.uniform(0, 40, 4000), rng.uniform(-3, 3, 4000), np.zeros(4000)])
    beam = sample_box_surface(rng, Aabb.from_center((20, 0, 5), (6, 0.4, 0.4)), 400)
    save_xyz(PointCloud(np.vstack([beam, ground])), tmp_path / "s.xyz")
    kb, reg, _ = _setup(tmp_path)
    hor = _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:HorizontalElementDetection(?h, ?d)")
    ver = _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:VerticalElementDetection(?v, ?d)")
    assert len(hor) == 1 and ver == []


def test_only_masts_gives_no_horizontal(scene_dir):
    kb, reg, _ = _setup(scene_dir([MAST, ("Mast", (30.0, 0.0), (0.3, 0.3, 6.0))]))
    assert _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:HorizontalElementDetection(?h, ?d)") == []
    assert len(_run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:VerticalElementDetection(?v, ?d)")) == 2


def test_mixed_scene_disjoint_ids(tmp_path):
    rng = np.random.default_rng(5)
    ground = np.column_stack([rng.uniform(0, 40, 4000), rng.uniform(-3, 3, 4000), np.zeros(4000)])
    mast = sample_box_surface(rng, Aabb.from_center((5, 0, 3), (0.3, 0.3, 6)), 400)
    beam = sample_box_surface(rng, Aabb.from_center((25, 0, 5), (6, 0.4, 0.4)), 400)
    save_xyz(PointCloud(np.vstack([mast, beam, ground])), tmp_path / "s.xyz")
    kb, reg, _ = _setup(tmp_path)
    ver = {b["v"] for b in _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:VerticalElementDetection(?v, ?d)")}
    hor = {b["h"] for b in _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:HorizontalElementDetection(?h, ?d)")}
    assert len(ver) == 1 and len(hor) == 1 and not ver & hor


def test_bound_target_filters(scene_dir):
    kb, reg, _ = _setup(scene_dir([MAST]))
    yes = _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:VerticalElementDetection(geo_0, ?d)")
    assert len(yes) == 1


def test_missing_directory_property(kb):
    det = ElementDetector()
    kb.add_type(N("s"), N("Scene"))
    with pytest.raises(DetectionError, match="hasPointCloudDirectory"):
        det.run(kb, N("s"))
    with pytest.raises(DetectionError):
        det.run(kb, Var("s"))


def test_unreadable_directory(tmp_path):
    kb = scene_kb(tmp_path / "absent")
    with pytest.raises(DetectionError):
        ElementDetector().run(kb, N("scene"))


def test_detection_deterministic(scene_dir):
    d = scene_dir([MAST, ("Cab", (10.0, 1.0), (1.2, 0.6, 1.6))])
    a = ElementDetector().detect_directory(str(d)).elements
    b = ElementDetector().detect_directory(str(d)).elements
    assert a == b


def test_stored_vertical_boxes_recheck(scene_dir):
    kb, reg, _ = _setup(scene_dir([MAST, ("Mast", (30.0, 0.0), (0.35, 0.35, 8.0))]))
    _run(kb, reg, "Scene(?d) ^ 3D_swrlb_Processing:VerticalElementDetection(?v, ?d)")
    for ind in kb.individuals_of(N("Vertical_BoundingBox")):
        assert classify_orientation(stored_box(kb, ind)) is Orientation.VERTICAL
    assert kb.query(N("scene"), N("hasGeometry"), Var("g"))
    assert kb.query(Var("g"), RDF_TYPE, N("Ground"))
