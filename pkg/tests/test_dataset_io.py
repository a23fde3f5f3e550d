import numpy as np
import pytest

from triplanekit.errors import DataError
from triplanekit.geometry import make_camera_set, render_views, sample_colored_point_cloud, \
    sample_sdf_points
from triplanekit.geometry.dataset import (
    object_dir_complete,
    read_depth,
    read_named_arrays,
    read_object_dir,
    read_png,
    write_depth,
    write_named_arrays,
    write_object_dir,
    write_png,
)

from helpers import unit_cube


def test_depth_roundtrip_exact(tmp_path):
    depth = np.random.default_rng(0).uniform(0, 3, size=(17, 23)).astype(np.float32)
    path = str(tmp_path / "d.depth")
    write_depth(path, depth)
    back = read_depth(path)
    assert back.shape == (17, 23)
    assert np.array_equal(back.astype(np.float32), depth)


def test_depth_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.depth"
    path.write_bytes(b"NOTDEPTH" + b"\x00" * 24)
    with pytest.raises(DataError, match="magic"):
        read_depth(str(path))


def test_depth_header_is_16_bytes(tmp_path):
    path = str(tmp_path / "d.depth")
    write_depth(path, np.zeros((4, 8), dtype=np.float32))
    raw = open(path, "rb").read()
    assert len(raw) == 16 + 4 * 4 * 8
    assert raw[:8] == b"TPKDEPTH"


def test_png_roundtrip_within_quantization(tmp_path):
    rgb = np.random.default_rng(1).uniform(size=(16, 16, 3))
    path = str(tmp_path / "v.png")
    write_png(path, rgb)
    back = read_png(path)
    assert np.max(np.abs(back - rgb)) <= 0.5 / 255 + 1e-9


def test_named_array_container_roundtrip(tmp_path):
    path = str(tmp_path / "arrays.npz")
    a = np.arange(12, dtype=np.float64).reshape(3, 4)
    b = np.array([5], dtype=np.int64)
    write_named_arrays(path, alpha=a, beta=b)
    back = read_named_arrays(path)
    assert set(back) == {"alpha", "beta"}
    assert np.array_equal(back["alpha"], a)
    assert np.array_equal(back["beta"], b)


def test_object_dir_roundtrip(tmp_path):
    mesh = unit_cube()
    cams = make_camera_set(2, (-15, 30), seed=4, resolution=24)
    views = render_views(mesh, cams)
    pc = sample_colored_point_cloud(mesh, 256, seed=4)
    sdf = sample_sdf_points(mesh, 200, 56, seed=4)
    out = str(tmp_path / "obj0")
    write_object_dir(out, views, pc, sdf, seed=4, source="toy")
    assert object_dir_complete(out)

    data = read_object_dir(out)
    assert data["source"] == "toy"
    assert len(data["views"]) == 2
    v = data["views"][0]
    assert np.array_equal(v.mask > 0, v.depth > 0)
    assert np.allclose(v.depth, views[0].depth, atol=1e-6)
    assert np.allclose(v.rgb, views[0].rgb, atol=0.5 / 255 + 1e-9)
    assert np.array_equal(data["point_cloud"].points, pc.points)
    assert np.array_equal(data["sdf_set"].sdf_values, sdf.sdf_values)
    assert data["sdf_set"].split_index == sdf.split_index


def test_incomplete_object_dir_detected(tmp_path):
    out = str(tmp_path / "obj1")
    mesh = unit_cube()
    cams = make_camera_set(1, (-15, 30), seed=1, resolution=16)
    write_object_dir(out, render_views(mesh, cams),
                     sample_colored_point_cloud(mesh, 64, seed=1),
                     sample_sdf_points(mesh, 64, 16, seed=1), seed=1)
    (tmp_path / "obj1" / "view_000.depth").unlink()
    assert not object_dir_complete(out)
