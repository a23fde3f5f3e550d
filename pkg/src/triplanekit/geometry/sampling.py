"""Surface point-cloud sampling and signed-distance supervision sampling."""
from __future__ import annotations

import warnings

import numpy as np

from ..errors import DataError
from .mesh import is_watertight
from .types import ColoredPointCloud, MeshAsset, SDFSampleSet

# fixed, axis-incommensurate parity-ray directions (majority vote of three)
_PARITY_DIRS = np.array([
    [0.57735027, 0.21132487, 0.78867513],
    [-0.31622777, 0.85065081, 0.42000042],
    [0.73105858, -0.48075368, 0.52573111],
])
_PARITY_DIRS /= np.linalg.norm(_PARITY_DIRS, axis=1, keepdims=True)

SDF_NOISE_SIGMA = 0.02


def sample_surface(mesh: MeshAsset, n: int, rng: np.random.Generator
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Area-weighted surface samples. Returns (positions, colors), each (n, 3)."""
    areas = mesh.face_areas()
    total = areas.sum()
    if total <= 0:
        raise DataError("mesh has zero surface area")
    face_idx = rng.choice(len(areas), size=n, p=areas / total)
    u = rng.uniform(size=n)
    v = rng.uniform(size=n)
    flip = u + v > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    w = np.stack([1.0 - u - v, u, v], axis=1)
    tri = mesh.triangles()[face_idx]
    pos = np.einsum("nk,nkc->nc", w, tri)
    col = np.einsum("nk,nkc->nc", w, mesh.colors_or_gray()[mesh.faces][face_idx])
    return pos, col


def sample_colored_point_cloud(mesh: MeshAsset, n: int, seed: int) -> ColoredPointCloud:
    """Sample an (n, 6) colored point cloud; colorless meshes fall back to gray."""
    if n <= 0:
        raise DataError("point count must be positive")
    rng = np.random.default_rng(seed)
    pos, col = sample_surface(mesh, n, rng)
    points = np.concatenate([pos, col], axis=1)
    return ColoredPointCloud(points=points[rng.permutation(n)])


def sample_sdf_points(
    mesh: MeshAsset,
    m_surface: int,
    m_uniform: int,
    seed: int,
    noise_sigma: float = SDF_NOISE_SIGMA,
) -> SDFSampleSet:
    """Signed-distance samples: Gaussian-perturbed surface points plus uniform cube points.

    Signs use ray-parity voting; a non-watertight mesh triggers a warning and
    best-effort signs. Inside is negative.
    """
    if m_surface + m_uniform <= 0:
        raise DataError("need at least one SDF sample")
    rng = np.random.default_rng(seed)
    parts = []
    if m_surface > 0:
        pos, _ = sample_surface(mesh, m_surface, rng)
        parts.append(pos + rng.normal(scale=noise_sigma, size=pos.shape))
    if m_uniform > 0:
        parts.append(rng.uniform(-0.5, 0.5, size=(m_uniform, 3)))
    queries = np.concatenate(parts, axis=0)

    if not is_watertight(mesh):
        warnings.warn("mesh is not watertight; SDF signs are best-effort", stacklevel=2)
    sdf = signed_distance(mesh, queries)
    if not (np.any(sdf > 0) and np.any(sdf <= 0)):
        raise DataError("SDF sampling produced only one side of the surface")
    return SDFSampleSet(query_points=queries, sdf_values=sdf)


def signed_distance(mesh: MeshAsset, points: np.ndarray) -> np.ndarray:
    """Signed distance from each point to the mesh surface, negative inside."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    dist = np.sqrt(unsigned_distance_sq(mesh, points))
    inside = _inside_by_parity(mesh, points)
    return np.where(inside, -dist, dist)


def unsigned_distance_sq(mesh: MeshAsset, points: np.ndarray) -> np.ndarray:
    """Squared distance from each point to its nearest triangle."""
    tri = mesh.triangles()
    out = np.empty(len(points))
    chunk = max(8, int(2e6 / max(len(tri), 1)))
    for start in range(0, len(points), chunk):
        out[start:start + chunk] = _chunk_distance_sq(points[start:start + chunk], tri)
    return out


def _chunk_distance_sq(p: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Closest-point-on-triangle distances for a block of points, min over faces."""
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    ab = b - a
    ac = c - a
    p = p[:, None, :]  # (n, 1, 3)
    ap = p - a
    d1 = np.einsum("fc,nfc->nf", ab, ap)
    d2 = np.einsum("fc,nfc->nf", ac, ap)
    bp = p - b
    d3 = np.einsum("fc,nfc->nf", ab, bp)
    d4 = np.einsum("fc,nfc->nf", ac, bp)
    cp = p - c
    d5 = np.einsum("fc,nfc->nf", ab, cp)
    d6 = np.einsum("fc,nfc->nf", ac, cp)

    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    def _safe_div(num, den):
        return num / np.where(np.abs(den) < 1e-300, 1.0, den)

    t_ab = np.clip(_safe_div(d1, d1 - d3), 0.0, 1.0)
    t_ac = np.clip(_safe_div(d2, d2 - d6), 0.0, 1.0)
    t_bc = np.clip(_safe_div(d4 - d3, (d4 - d3) + (d5 - d6)), 0.0, 1.0)
    denom = _safe_div(np.ones_like(va), va + vb + vc)
    v_in = vb * denom
    w_in = vc * denom

    # region selection, innermost condition first
    closest = a + v_in[..., None] * ab + w_in[..., None] * ac
    on_bc = (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0)
    closest = np.where(on_bc[..., None], b + t_bc[..., None] * (c - b), closest)
    on_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    closest = np.where(on_ac[..., None], a + t_ac[..., None] * ac, closest)
    on_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    closest = np.where(on_ab[..., None], a + t_ab[..., None] * ab, closest)
    at_c = (d6 >= 0) & (d5 <= d6)
    closest = np.where(at_c[..., None], np.broadcast_to(c, closest.shape), closest)
    at_b = (d3 >= 0) & (d4 <= d3)
    closest = np.where(at_b[..., None], np.broadcast_to(b, closest.shape), closest)
    at_a = (d1 <= 0) & (d2 <= 0)
    closest = np.where(at_a[..., None], np.broadcast_to(a, closest.shape), closest)

    return np.min(np.sum((p - closest) ** 2, axis=-1), axis=1)


def _inside_by_parity(mesh: MeshAsset, points: np.ndarray) -> np.ndarray:
    """Majority vote over three fixed ray directions of crossing-count parity."""
    votes = np.zeros(len(points), dtype=np.int64)
    for direction in _PARITY_DIRS:
        votes += _crossings(mesh, points, direction) % 2
    return votes >= 2


def _crossings(mesh: MeshAsset, points: np.ndarray, direction: np.ndarray) -> np.ndarray:
    tri = mesh.triangles()
    v0 = tri[:, 0]
    e1 = tri[:, 1] - tri[:, 0]
    e2 = tri[:, 2] - tri[:, 0]
    d = direction
    pvec = np.cross(d, e2)  # (F, 3), shared by all rays
    det = np.einsum("fc,fc->f", pvec, e1)
    ok = np.abs(det) > 1e-12
    inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    counts = np.empty(len(points), dtype=np.int64)
    chunk = max(8, int(2e6 / max(len(tri), 1)))
    for start in range(0, len(points), chunk):
        o = points[start:start + chunk][:, None, :]
        tvec = o - v0[None, :, :]
        u = np.einsum("nfc,fc->nf", tvec, pvec) * inv_det
        qvec = np.cross(tvec, e1[None, :, :])
        v = np.einsum("nfc,c->nf", qvec, d) * inv_det
        t = np.einsum("nfc,fc->nf", qvec, e2) * inv_det
        valid = ok[None, :] & (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 1e-12)
        counts[start:start + chunk] = valid.sum(axis=1)
    return counts
