"""CPU ray-triangle renderer producing exact ground-truth RGB/depth/mask views."""
from __future__ import annotations

import numpy as np

from ..errors import DataError
from .cameras import camera_rays
from .types import CameraPose, MeshAsset, MultiViewSample

BACKGROUND = np.array([1.0, 1.0, 1.0])
_RAY_CHUNK = 1024
_EPS = 1e-12


def render_views(
    mesh: MeshAsset,
    cameras: list[CameraPose],
    background: np.ndarray = BACKGROUND,
) -> list[MultiViewSample]:
    """Render each camera with nearest-hit ray tracing.

    Depth is the Euclidean distance from the camera to the hit point
    (0 for misses); RGB comes from barycentric-interpolated vertex colors;
    mask is 1 exactly where depth > 0.
    """
    tri = mesh.triangles()
    colors = mesh.colors_or_gray()[mesh.faces]  # (F, 3 corners, 3 rgb)
    bounding_radius = float(np.linalg.norm(mesh.vertices, axis=1).max())
    out = []
    for camera in cameras:
        if np.linalg.norm(camera.position) < bounding_radius + 0.05:
            raise DataError("camera sits inside the mesh's bounding sphere")
        origins, dirs = camera_rays(camera)
        res = camera.resolution
        o = origins.reshape(-1, 3)
        d = dirs.reshape(-1, 3)
        t_hit, face_idx, bary = _trace(o, d, tri)
        hit = face_idx >= 0
        rgb = np.tile(np.asarray(background, dtype=np.float64), (len(o), 1))
        if hit.any():
            fi = face_idx[hit]
            w = bary[hit]  # (n_hit, 3) barycentric weights
            rgb[hit] = np.einsum("nk,nkc->nc", w, colors[fi])
        depth = np.where(hit, t_hit, 0.0)
        out.append(MultiViewSample(
            rgb=rgb.reshape(res, res, 3),
            depth=depth.reshape(res, res),
            mask=hit.reshape(res, res).astype(np.float64),
            camera=camera,
        ))
    return out


def _trace(origins: np.ndarray, dirs: np.ndarray,
           tri: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nearest-hit Moller-Trumbore over all rays x triangles, chunked over rays.

    Returns (t, face_index, barycentric) per ray; face_index is -1 for misses
    and barycentric rows are (1-u-v, u, v).
    """
    n = len(origins)
    t_best = np.full(n, np.inf)
    idx_best = np.full(n, -1, dtype=np.int64)
    bary_best = np.zeros((n, 3))

    v0 = tri[:, 0]
    e1 = tri[:, 1] - tri[:, 0]
    e2 = tri[:, 2] - tri[:, 0]
    # keep rays x faces temporaries around ~100 MB
    chunk = max(16, min(_RAY_CHUNK, int(4e6 / max(len(tri), 1))))
    for start in range(0, n, chunk):
        o = origins[start:start + chunk][:, None, :]  # (r, 1, 3)
        d = dirs[start:start + chunk][:, None, :]
        pvec = np.cross(d, e2[None, :, :])
        det = np.einsum("rfc,fc->rf", pvec, e1)
        ok = np.abs(det) > _EPS
        inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
        tvec = o - v0[None, :, :]
        u = np.einsum("rfc,rfc->rf", tvec, pvec) * inv_det
        qvec = np.cross(tvec, e1[None, :, :])
        v = np.einsum("rfc,rfc->rf", qvec, d) * inv_det
        t = np.einsum("rfc,fc->rf", qvec, e2) * inv_det
        valid = ok & (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 1e-9)
        t = np.where(valid, t, np.inf)
        fi = np.argmin(t, axis=1)
        rows = np.arange(len(fi))
        t_min = t[rows, fi]
        better = t_min < t_best[start:start + len(fi)]
        sl = slice(start, start + len(fi))
        t_best[sl] = np.where(better, t_min, t_best[sl])
        idx_best[sl] = np.where(better, fi, idx_best[sl])
        u_min = u[rows, fi]
        v_min = v[rows, fi]
        bary = np.stack([1.0 - u_min - v_min, u_min, v_min], axis=1)
        bary_best[sl] = np.where(better[:, None], bary, bary_best[sl])
    return t_best, idx_best, bary_best
