"""On-disk dataset layout: one directory per object.

Per object:
    view_###.png        8-bit RGB render
    view_###.depth      float32 depth map, 16-byte header (magic, height, width)
    arrays.npz          named-array container (little-endian NPY entries) holding
                        the colored point cloud and the SDF sample set
    manifest.json       camera poses, file listing, seeds, source tag

The .depth header is: 8-byte magic b"TPKDEPTH", uint32 LE height, uint32 LE
width, followed by height*width little-endian float32 values in row-major
order.
"""
from __future__ import annotations

import json
import os
import struct

import numpy as np
from PIL import Image

from ..errors import DataError
from .types import CameraPose, ColoredPointCloud, MultiViewSample, SDFSampleSet

DEPTH_MAGIC = b"TPKDEPTH"
MANIFEST_NAME = "manifest.json"
ARRAYS_NAME = "arrays.npz"


def write_depth(path: str, depth: np.ndarray) -> None:
    depth = np.asarray(depth, dtype="<f4")
    if depth.ndim != 2:
        raise DataError("depth must be a 2D array")
    h, w = depth.shape
    with open(path, "wb") as fh:
        fh.write(DEPTH_MAGIC)
        fh.write(struct.pack("<II", h, w))
        fh.write(depth.tobytes(order="C"))


def read_depth(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != DEPTH_MAGIC:
            raise DataError(f"{path}: bad depth magic {magic!r}")
        h, w = struct.unpack("<II", fh.read(8))
        data = np.frombuffer(fh.read(4 * h * w), dtype="<f4")
    if data.size != h * w:
        raise DataError(f"{path}: truncated depth payload")
    return data.reshape(h, w).astype(np.float64)


def write_png(path: str, rgb: np.ndarray) -> None:
    arr = np.clip(np.asarray(rgb) * 255.0 + 0.5, 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(path)


def read_png(path: str) -> np.ndarray:
    arr = np.asarray(Image.open(path).convert("RGB"), dtype=np.float64)
    return arr / 255.0


def write_named_arrays(path: str, **arrays: np.ndarray) -> None:
    np.savez(path, **arrays)


def read_named_arrays(path: str) -> dict[str, np.ndarray]:
    with np.load(path) as data:
        return {k: data[k] for k in data.files}


def write_object_dir(
    out_dir: str,
    views: list[MultiViewSample],
    point_cloud: ColoredPointCloud,
    sdf_set: SDFSampleSet,
    seed: int,
    source: str = "default",
) -> None:
    os.makedirs(out_dir, exist_ok=True)
    view_entries = []
    for i, view in enumerate(views):
        rgb_name = f"view_{i:03d}.png"
        depth_name = f"view_{i:03d}.depth"
        write_png(os.path.join(out_dir, rgb_name), view.rgb)
        write_depth(os.path.join(out_dir, depth_name), view.depth)
        view_entries.append({
            "rgb": rgb_name,
            "depth": depth_name,
            "camera": view.camera.to_dict(),
        })
    write_named_arrays(
        os.path.join(out_dir, ARRAYS_NAME),
        point_cloud=point_cloud.points,
        sdf_points=sdf_set.query_points,
        sdf_values=sdf_set.sdf_values,
        sdf_split=np.asarray([sdf_set.split_index], dtype=np.int64),
    )
    manifest = {
        "views": view_entries,
        "arrays": ARRAYS_NAME,
        "seed": seed,
        "source": source,
    }
    with open(os.path.join(out_dir, MANIFEST_NAME), "w") as fh:
        json.dump(manifest, fh, indent=2)


def object_dir_complete(out_dir: str) -> bool:
    """True when the manifest exists and every file it references is present."""
    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    if not os.path.isfile(manifest_path):
        return False
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return False
    needed = [manifest.get("arrays", ARRAYS_NAME)]
    for entry in manifest.get("views", []):
        needed.extend([entry["rgb"], entry["depth"]])
    return all(os.path.isfile(os.path.join(out_dir, name)) for name in needed)


def read_object_dir(out_dir: str) -> dict:
    """Load an object directory back into memory.

    Returns a dict with keys: views (list of MultiViewSample), point_cloud,
    sdf_set, source, seed.
    """
    with open(os.path.join(out_dir, MANIFEST_NAME)) as fh:
        manifest = json.load(fh)
    views = []
    for entry in manifest["views"]:
        camera = CameraPose.from_dict(entry["camera"])
        rgb = read_png(os.path.join(out_dir, entry["rgb"]))
        depth = read_depth(os.path.join(out_dir, entry["depth"]))
        views.append(MultiViewSample(rgb=rgb, depth=depth,
                                     mask=(depth > 0).astype(np.float64), camera=camera))
    arrays = read_named_arrays(os.path.join(out_dir, manifest.get("arrays", ARRAYS_NAME)))
    point_cloud = ColoredPointCloud(points=arrays["point_cloud"])
    sdf_set = SDFSampleSet(
        query_points=arrays["sdf_points"],
        sdf_values=arrays["sdf_values"],
        split_index=int(arrays["sdf_split"][0]),
    )
    return {
        "views": views,
        "point_cloud": point_cloud,
        "sdf_set": sdf_set,
        "source": manifest.get("source", "default"),
        "seed": manifest.get("seed"),
    }


def list_object_dirs(dataset_dir: str) -> list[str]:
    """Sorted object subdirectories of a dataset directory."""
    if not os.path.isdir(dataset_dir):
        raise DataError(f"dataset directory not found: {dataset_dir}")
    return sorted(
        os.path.join(dataset_dir, name)
        for name in os.listdir(dataset_dir)
        if os.path.isdir(os.path.join(dataset_dir, name))
    )
