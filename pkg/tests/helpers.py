"""Shared test fixtures: analytic meshes and a central finite-difference checker."""
from __future__ import annotations

import numpy as np
import torch

from triplanekit.geometry import MeshAsset, normalize_mesh

CUBE_VERTICES = 0.5 * np.array([
    [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
    [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
], dtype=np.float64)

# 12 triangles, outward-facing
CUBE_FACES = np.array([
    [0, 2, 1], [0, 3, 2],  # z = -0.5
    [4, 5, 6], [4, 6, 7],  # z = +0.5
    [0, 1, 5], [0, 5, 4],  # y = -0.5
    [2, 3, 7], [2, 7, 6],  # y = +0.5
    [0, 4, 7], [0, 7, 3],  # x = -0.5
    [1, 2, 6], [1, 6, 5],  # x = +0.5
], dtype=np.int64)


def unit_cube(colors: bool = True) -> MeshAsset:
    vc = (CUBE_VERTICES + 0.5) if colors else None
    return MeshAsset(vertices=CUBE_VERTICES.copy(), faces=CUBE_FACES.copy(), vertex_colors=vc)


def icosphere(subdivisions: int = 2, radius: float = 0.5, colors: bool = True) -> MeshAsset:
    """Subdivided icosahedron scaled to the given radius."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=np.float64)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    for _ in range(subdivisions):
        verts, faces = _subdivide(verts, faces)
        verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    verts = verts * radius
    vc = None
    if colors:
        vc = 0.5 + 0.5 * verts / radius  # smooth position-based coloring
    return MeshAsset(vertices=verts, faces=faces, vertex_colors=vc)


def _subdivide(verts: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    verts = list(map(tuple, verts))
    cache: dict[tuple[int, int], int] = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            cache[key] = len(verts)
            verts.append(tuple(0.5 * (np.array(verts[i]) + np.array(verts[j]))))
        return cache[key]

    new_faces = []
    for a, b, c in faces:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        new_faces.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
    return np.asarray(verts, dtype=np.float64), np.asarray(new_faces, dtype=np.int64)


def normalized_sphere(subdivisions: int = 2) -> MeshAsset:
    return normalize_mesh(icosphere(subdivisions))


def central_difference_check(
    fn,
    tensors: list[torch.Tensor],
    n_coords: int = 10,
    h: float = 1e-5,
    rel_tol: float = 1e-4,
    seed: int = 0,
) -> float:
    """Compare autograd gradients of a scalar fn against central differences.

    `tensors` are float64 leaf tensors with requires_grad=True; for each, up
    to n_coords random coordinates are perturbed. Returns the worst relative
    error and asserts it is below rel_tol.
    """
    rng = np.random.default_rng(seed)
    out = fn()
    assert out.dim() == 0, "finite-difference check needs a scalar output"
    grads = torch.autograd.grad(out, tensors, allow_unused=False)
    worst = 0.0
    for tensor, grad in zip(tensors, grads):
        flat = tensor.detach().reshape(-1)
        n = min(n_coords, flat.numel())
        coords = rng.choice(flat.numel(), size=n, replace=False)
        for idx in coords:
            orig = flat[idx].item()
            with torch.no_grad():
                flat[idx] = orig + h
                f_plus = fn().item()
                flat[idx] = orig - h
                f_minus = fn().item()
                flat[idx] = orig
            fd = (f_plus - f_minus) / (2.0 * h)
            an = grad.reshape(-1)[idx].item()
            scale = max(abs(fd), abs(an))
            if scale < 1e-8:
                continue  # both effectively zero
            rel = abs(fd - an) / scale
            worst = max(worst, rel)
            assert rel < rel_tol, (
                f"gradient mismatch at coord {idx}: analytic {an:.6e} vs "
                f"finite-difference {fd:.6e} (rel err {rel:.3e})")
    return worst
