import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from railsem.cloud import CloudFormatError, PointCloud, load_scene_dir, load_xyz, remove_ground, save_xyz, voxelize
from railsem.synth import generate

from conftest import small_spec


def test_minimal_file(tmp_path):
    f = tmp_path / "a.xyz"
    f.write_text("0 0 0\n1 2 3")
    assert load_xyz(f).points.tolist() == [[0, 0, 0], [1, 2, 3]]


def test_comments_blank_lines_and_extra_columns(tmp_path):
    f = tmp_path / "a.xyz"
    f.write_text("# header\n\n0 0 0 255 0 0\n  1 2 3\n")
    assert len(load_xyz(f)) == 2


def test_malformed_token_reports_line(tmp_path):
    f = tmp_path / "a.xyz"
    f.write_text("1 2 x\n")
    with pytest.raises(CloudFormatError, match=r"a\.xyz:1: malformed coordinate 'x'"):
        load_xyz(f)
    f.write_text("0 0 0\n# c\n1 2\n")
    with pytest.raises(CloudFormatError, match=r":3:"):
        load_xyz(f)


def test_empty_and_missing_files(tmp_path):
    f = tmp_path / "a.xyz"
    f.write_text("# nothing\n")
    with pytest.raises(CloudFormatError, match="no points"):
        load_xyz(f)
    with pytest.raises(FileNotFoundError):
        load_xyz(tmp_path / "missing.xyz")
    with pytest.raises(FileNotFoundError):
        load_scene_dir(tmp_path / "nodir")


def test_scene_dir_concatenates_in_path_order(tmp_path):
    (tmp_path / "b.xyz").write_text("2 2 2\n")
    (tmp_path / "a.xyz").write_text("1 1 1\n")
    (tmp_path / "notes.txt").write_text("9 9 9\n")
    assert load_scene_dir(tmp_path).points.tolist() == [[1, 1, 1], [2, 2, 2]]


def test_voxelize_examples():
    assert len(voxelize(PointCloud(np.array([[0, 0, 0], [0.3, 0, 0.0]])), 1.0).cells) == 1
    assert len(voxelize(PointCloud(np.array([[0, 0, 0], [1.5, 0, 0.0]])), 1.0).cells) == 2
    with pytest.raises(ValueError):
        voxelize(PointCloud(np.zeros((1, 3))), 0.0)


def test_voxelize_unit_lattice():
    g = np.stack(np.meshgrid(*[np.arange(10.0)] * 3), axis=-1).reshape(-1, 3) + 0.5
    grid = voxelize(PointCloud(g), 1.0)
    assert len(grid.cells) == 1000
    assert all(len(v) == 1 for v in grid.cells.values())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 300), st.floats(0.05, 3.0))
def test_voxelize_partitions_points(seed, n, res):
    pts = np.random.default_rng(seed).uniform(-5, 5, (n, 3))
    grid = voxelize(PointCloud(pts), res)
    idx = np.concatenate(list(grid.cells.values()))
    assert grid.population == n
    assert sorted(idx.tolist()) == list(range(n))
    for key, members in grid.cells.items():
        for i in members:
            assert grid.cell_of(pts[i]) == key


def test_ground_holds_plane_points():
    cloud, truth = generate(small_spec([("Mast", (20.0, 0.0), (0.3, 0.3, 6.0))]))
    start, end = truth.ground_range
    ground, rest = remove_ground(cloud, 0.30)
    plane = {tuple(p) for p in cloud.points[start:end]}
    got = {tuple(p) for p in ground.points}
    assert len(plane & got) >= 0.99 * len(plane)
    assert len(ground) + len(rest) == len(cloud)


def test_uniform_z_still_partitions():
    z = np.linspace(0, 10, 101)
    cloud = PointCloud(np.column_stack([np.zeros_like(z), np.zeros_like(z), z]))
    ground, rest = remove_ground(cloud, 0.3)
    assert len(ground) > 0 and len(ground) + len(rest) == len(cloud)
    assert ground.points[:, 2].min() == 0.0


def test_remove_ground_rejects_empty():
    with pytest.raises(ValueError):
        remove_ground(PointCloud(np.zeros((0, 3))))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 200))
def test_remove_ground_is_partition(seed, n):
    pts = np.random.default_rng(seed).uniform(0, 8, (n, 3))
    ground, rest = remove_ground(PointCloud(pts))
    both = np.vstack([ground.points, rest.points])
    assert len(both) == n
    assert sorted(map(tuple, both)) == sorted(map(tuple, pts))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_save_load_roundtrip(tmp_path_factory, seed):
    pts = np.random.default_rng(seed).uniform(-1e3, 1e3, (50, 3))
    f = tmp_path_factory.mktemp("rt") / "p.xyz"
    save_xyz(PointCloud(pts), f)
    once = load_xyz(f).points
    assert np.abs(once - pts).max() <= 5e-7
    save_xyz(PointCloud(once), f)
    assert np.array_equal(load_xyz(f).points, once)
