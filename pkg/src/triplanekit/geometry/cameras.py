"""Camera pose sampling on a sphere around the origin and per-pixel ray generation."""
from __future__ import annotations

import numpy as np

from ..errors import DataError
from .types import CameraPose

DEFAULT_RADIUS = 2.0
DEFAULT_FOV_Y_DEG = 40.0


def look_at_origin(position: np.ndarray, fov_y: float, resolution: int) -> CameraPose:
    """Build a pose at `position` looking at the origin, world up = +z."""
    position = np.asarray(position, dtype=np.float64)
    dist = np.linalg.norm(position)
    if dist <= 0:
        raise DataError("camera cannot sit at the origin")
    forward = -position / dist
    world_up = np.array([0.0, 0.0, 1.0])
    if abs(np.dot(forward, world_up)) > 1.0 - 1e-9:
        world_up = np.array([1.0, 0.0, 0.0])  # looking straight up/down
    right = np.cross(world_up, forward)
    right /= np.linalg.norm(right)
    up = np.cross(forward, right)
    rotation = np.stack([right, up, forward], axis=1)
    return CameraPose(rotation=rotation, translation=position, fov_y=fov_y,
                      resolution=resolution)


def make_camera_set(
    n_views: int,
    elevation_range: tuple[float, float],
    seed: int,
    radius: float = DEFAULT_RADIUS,
    fov_y_deg: float = DEFAULT_FOV_Y_DEG,
    resolution: int = 64,
) -> list[CameraPose]:
    """Sample `n_views` poses with uniform-random azimuth and elevation.

    Elevation is in degrees measured from the xy-plane and must lie in
    [-90, 90]. Deterministic for a fixed seed.
    """
    if n_views < 1:
        raise DataError("n_views must be >= 1")
    lo, hi = float(elevation_range[0]), float(elevation_range[1])
    if not (-90.0 <= lo <= hi <= 90.0):
        raise DataError(f"invalid elevation range {elevation_range}")
    rng = np.random.default_rng(seed)
    azimuths = rng.uniform(0.0, 2.0 * np.pi, size=n_views)
    elevations = np.deg2rad(rng.uniform(lo, hi, size=n_views))
    fov_y = float(np.deg2rad(fov_y_deg))
    cameras = []
    for az, el in zip(azimuths, elevations):
        position = radius * np.array([
            np.cos(el) * np.cos(az),
            np.cos(el) * np.sin(az),
            np.sin(el),
        ])
        cameras.append(look_at_origin(position, fov_y, resolution))
    return cameras


def camera_rays(camera: CameraPose) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel world-space rays through pixel centers.

    Returns (origins, directions), each (H, W, 3) with unit directions;
    row 0 is the top of the image and the v axis points up.
    """
    res = camera.resolution
    half = np.tan(0.5 * camera.fov_y)
    # pixel centers in NDC, u to the right, v up
    coords = (np.arange(res) + 0.5) / res * 2.0 - 1.0
    u = coords[None, :].repeat(res, axis=0) * half
    v = -coords[:, None].repeat(res, axis=1) * half
    dirs_cam = np.stack([u, v, np.ones_like(u)], axis=-1)
    dirs_world = dirs_cam @ camera.rotation.T
    dirs_world /= np.linalg.norm(dirs_world, axis=-1, keepdims=True)
    origins = np.broadcast_to(camera.position, dirs_world.shape).copy()
    return origins, dirs_world
