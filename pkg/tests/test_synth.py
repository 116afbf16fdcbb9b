import json

import numpy as np
import pytest

from railsem.cloud import load_xyz
from railsem.synth import (
    GroundSpec,
    SceneObject,
    SceneSpec,
    SceneSpecError,
    generate,
    reference_spec,
    surface_area,
    write_scene,
)

from conftest import small_spec


def test_ground_only():
    cloud, truth = generate(small_spec([]))
    assert truth.objects == []
    assert truth.ground_range == (0, len(cloud))
    assert np.all(cloud.points[:, 2] == 0.0)


def test_mast_point_count_matches_area():
    dims = (0.3, 0.3, 6.0)
    _, truth = generate(small_spec([("Mast", (20.0, 0.0), dims)]))
    (mast,) = truth.objects
    expected = surface_area(dims) * 400
    assert expected == pytest.approx(2952)
    assert abs((mast.end - mast.start) - expected) <= 0.02 * expected


def test_same_seed_same_cloud_other_seed_differs():
    a, _ = generate(small_spec([("Mast", (20.0, 0.0), (0.3, 0.3, 6.0))], noise=0.01, seed=7))
    b, _ = generate(small_spec([("Mast", (20.0, 0.0), (0.3, 0.3, 6.0))], noise=0.01, seed=7))
    c, _ = generate(small_spec([("Mast", (20.0, 0.0), (0.3, 0.3, 6.0))], noise=0.01, seed=8))
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


def test_overlap_rejected_with_ids():
    spec = small_spec([("Mast", (20.0, 0.0), (0.3, 0.3, 6.0)), ("Mast", (20.1, 0.0), (0.3, 0.3, 6.0))])
    with pytest.raises(SceneSpecError, match="mast_0/mast_1"):
        generate(spec)


@pytest.mark.parametrize("bad", [
    dict(points_per_m2=0.0),
    dict(objects=[SceneObject("Mast", (50.0, 0.0, 3.0), (0.3, 0.3, 6.0), "m")]),
    dict(objects=[SceneObject("Mast", (5.0, 0.0, 3.0), (0.3, -0.3, 6.0), "m")]),
    dict(objects=[SceneObject("A", (5.0, 0.0, 1.0), (1, 1, 1), "m"), SceneObject("A", (9.0, 0.0, 1.0), (1, 1, 1), "m")]),
])
def test_invalid_specs(bad):
    base = dict(length_m=40.0, objects=[], ground=GroundSpec((0, 40, -3, 3), 0, 20), points_per_m2=400.0)
    base.update(bad)
    with pytest.raises(SceneSpecError):
        generate(SceneSpec(**base))


def test_noise_stays_in_inflated_box():
    sigma = 0.02
    spec = small_spec([("Mast", (10.0, 0.0), (0.3, 0.3, 6.0)), ("Cab", (25.0, 1.0), (1.2, 0.6, 1.6))],
                      noise=sigma, seed=11)
    cloud, truth = generate(spec)
    for obj in truth.objects:
        box = obj.box.inflated(3 * sigma)
        pts = cloud.points[obj.start:obj.end]
        lo, hi = np.array(box.min_corner), np.array(box.max_corner)
        inside = np.all((pts >= lo) & (pts <= hi), axis=1).mean()
        assert inside >= 0.997


def test_truth_ranges_partition_non_ground():
    cloud, truth = generate(reference_spec())
    spans = sorted((o.start, o.end) for o in truth.objects)
    assert spans[0][0] == 0
    assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))
    assert spans[-1][1] == truth.ground_range[0]
    assert truth.ground_range[1] == len(cloud)


def test_reference_catalogue():
    spec = reference_spec()
    spec.validate()
    counts = {}
    for o in spec.objects:
        counts[o.cls] = counts.get(o.cls, 0) + 1
    assert counts == {"Mast": 13, "Schaltanlage": 15, "DistantSignal": 3, "MainSignal": 3}
    assert len(spec.objects) == 34
    for o in spec.objects:
        if o.cls == "Mast":
            dx, dy, dz = o.dims
            assert 4.0 < dz < 12.0 and max(dx, dy) < 1.0
    by_id = {o.id: o for o in spec.objects}
    for k in range(3):
        gap = by_id[f"main_{k}"].center[0] - by_id[f"distant_{k}"].center[0]
        assert abs(gap - 1000.0) <= 10.0


def test_spec_json_roundtrip(tmp_path):
    spec = reference_spec(noise_sigma=0.01, seed=4)
    again = SceneSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert again == spec


def test_written_scene_loads_back(tmp_path):
    spec = small_spec([("Mast", (20.0, 0.0), (0.3, 0.3, 6.0))], noise=0.02)
    xyz, tj = write_scene(spec, tmp_path)
    cloud, _ = generate(spec)
    assert np.abs(load_xyz(xyz).points - cloud.points).max() <= 5e-7
    truth = json.loads(tj.read_text())
    assert truth["objects"][0]["id"] == "mast_0"
    first = xyz.read_bytes()
    write_scene(spec, tmp_path)
    assert xyz.read_bytes() == first
