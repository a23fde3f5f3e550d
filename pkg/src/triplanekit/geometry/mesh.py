"""Mesh loading (ASCII OBJ / PLY), normalization, watertightness check, export."""
from __future__ import annotations

import os

import numpy as np

from ..errors import MeshFormatError
from .types import MeshAsset


def load_mesh(path: str) -> MeshAsset:
    """Parse an ASCII OBJ or PLY triangle mesh, keeping per-vertex colors if present."""
    if not os.path.isfile(path):
        raise MeshFormatError(f"mesh file not found: {path}")
    ext = os.path.splitext(path)[1].lower()
    if ext == ".obj":
        mesh = _parse_obj(path)
    elif ext == ".ply":
        mesh = _parse_ply(path)
    else:
        raise MeshFormatError(f"unsupported mesh extension {ext!r} (OBJ/PLY only)")
    if mesh.n_vertices == 0 or mesh.n_faces == 0:
        raise MeshFormatError(f"empty mesh: {path}")
    return mesh


def normalize_mesh(mesh: MeshAsset) -> MeshAsset:
    """Center the bounding box at the origin and scale the largest extent to 1.

    Result lies inside the cube [-0.5, 0.5]^3; applying it twice is the
    identity to within floating-point roundoff.
    """
    lo = mesh.vertices.min(axis=0)
    hi = mesh.vertices.max(axis=0)
    center = 0.5 * (lo + hi)
    extent = float((hi - lo).max())
    if extent <= 0:
        raise MeshFormatError("degenerate mesh: zero bounding-box extent")
    vertices = (mesh.vertices - center) / extent
    return MeshAsset(vertices=vertices, faces=mesh.faces.copy(),
                     vertex_colors=None if mesh.vertex_colors is None else mesh.vertex_colors.copy())


def load_and_normalize_mesh(path: str) -> MeshAsset:
    return normalize_mesh(load_mesh(path))


def is_watertight(mesh: MeshAsset) -> bool:
    """True when every undirected edge is shared by exactly two faces."""
    edges = np.concatenate([mesh.faces[:, [0, 1]], mesh.faces[:, [1, 2]], mesh.faces[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    return bool(np.all(counts == 2))


def export_obj(mesh: MeshAsset, path: str) -> None:
    """Write OBJ; vertex colors use the common `v x y z r g b` extension."""
    colors = mesh.vertex_colors
    with open(path, "w") as fh:
        for i, v in enumerate(mesh.vertices):
            if colors is not None:
                c = colors[i]
                fh.write(f"v {v[0]:.8g} {v[1]:.8g} {v[2]:.8g} {c[0]:.6g} {c[1]:.6g} {c[2]:.6g}\n")
            else:
                fh.write(f"v {v[0]:.8g} {v[1]:.8g} {v[2]:.8g}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def export_ply(mesh: MeshAsset, path: str) -> None:
    """Write ASCII PLY with uchar vertex colors when the mesh has them."""
    colors = mesh.vertex_colors
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {mesh.n_vertices}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        if colors is not None:
            fh.write("property uchar red\nproperty uchar green\nproperty uchar blue\n")
        fh.write(f"element face {mesh.n_faces}\n")
        fh.write("property list uchar int vertex_indices\nend_header\n")
        for i, v in enumerate(mesh.vertices):
            line = f"{v[0]:.8g} {v[1]:.8g} {v[2]:.8g}"
            if colors is not None:
                c = np.clip(np.round(colors[i] * 255), 0, 255).astype(int)
                line += f" {c[0]} {c[1]} {c[2]}"
            fh.write(line + "\n")
        for f in mesh.faces:
            fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")


def _parse_obj(path: str) -> MeshAsset:
    vertices: list[list[float]] = []
    colors: list[list[float]] = []
    faces: list[list[int]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            if tag == "v":
                if len(parts) not in (4, 7):
                    raise MeshFormatError(f"{path}:{lineno}: bad vertex line")
                try:
                    vals = [float(x) for x in parts[1:]]
                except ValueError as exc:
                    raise MeshFormatError(f"{path}:{lineno}: non-numeric vertex") from exc
                vertices.append(vals[:3])
                if len(vals) == 6:
                    colors.append(vals[3:])
            elif tag == "f":
                idx = parts[1:]
                if len(idx) != 3:
                    raise MeshFormatError(
                        f"{path}:{lineno}: non-triangular face with {len(idx)} vertices")
                try:
                    face = [int(tok.split("/")[0]) for tok in idx]
                except ValueError as exc:
                    raise MeshFormatError(f"{path}:{lineno}: bad face index") from exc
                # OBJ indices are 1-based; negative indices count from the end.
                face = [i - 1 if i > 0 else len(vertices) + i for i in face]
                faces.append(face)
            # other tags (vn, vt, usemtl, ...) are ignored
    if colors and len(colors) != len(vertices):
        raise MeshFormatError(f"{path}: only some vertices carry colors")
    return MeshAsset(
        vertices=np.asarray(vertices, dtype=np.float64).reshape(-1, 3),
        faces=np.asarray(faces, dtype=np.int64).reshape(-1, 3),
        vertex_colors=np.asarray(colors, dtype=np.float64) if colors else None,
    )


def _parse_ply(path: str) -> MeshAsset:
    with open(path, "rb") as fh:
        first = fh.readline().strip()
        if first != b"ply":
            raise MeshFormatError(f"{path}: missing 'ply' magic")
        n_vertex = n_face = 0
        vertex_props: list[tuple[str, str]] = []
        current = None
        while True:
            raw = fh.readline()
            if not raw:
                raise MeshFormatError(f"{path}: truncated header")
            line = raw.decode("ascii", errors="replace").strip()
            if line.startswith("comment"):
                continue
            if line.startswith("format"):
                if "ascii" not in line:
                    raise MeshFormatError(f"{path}: only ASCII PLY is supported")
            elif line.startswith("element"):
                _, name, count = line.split()
                current = name
                if name == "vertex":
                    n_vertex = int(count)
                elif name == "face":
                    n_face = int(count)
            elif line.startswith("property") and current == "vertex":
                parts = line.split()
                if parts[1] == "list":
                    raise MeshFormatError(f"{path}: list property on vertices")
                vertex_props.append((parts[1], parts[2]))
            elif line == "end_header":
                break
        body = fh.read().decode("ascii", errors="replace").split("\n")

    prop_names = [name for _, name in vertex_props]
    for axis in ("x", "y", "z"):
        if axis not in prop_names:
            raise MeshFormatError(f"{path}: vertex property {axis!r} missing")
    has_color = all(c in prop_names for c in ("red", "green", "blue"))
    color_is_byte = has_color and vertex_props[prop_names.index("red")][0] in ("uchar", "uint8")

    rows = [line.split() for line in body if line.strip()]
    if len(rows) < n_vertex + n_face:
        raise MeshFormatError(f"{path}: body shorter than header promises")
    try:
        vdata = np.asarray([[float(x) for x in row] for row in rows[:n_vertex]], dtype=np.float64)
    except ValueError as exc:
        raise MeshFormatError(f"{path}: non-numeric vertex data") from exc
    if vdata.shape[0] != n_vertex or (n_vertex and vdata.shape[1] != len(prop_names)):
        raise MeshFormatError(f"{path}: vertex rows do not match declared properties")
    xyz = vdata[:, [prop_names.index(a) for a in ("x", "y", "z")]]
    colors = None
    if has_color:
        colors = vdata[:, [prop_names.index(c) for c in ("red", "green", "blue")]]
        if color_is_byte:
            colors = colors / 255.0

    faces = []
    for row in rows[n_vertex:n_vertex + n_face]:
        count = int(row[0])
        if count != 3:
            raise MeshFormatError(f"{path}: non-triangular face with {count} vertices")
        faces.append([int(row[1]), int(row[2]), int(row[3])])
    return MeshAsset(
        vertices=xyz,
        faces=np.asarray(faces, dtype=np.int64).reshape(-1, 3),
        vertex_colors=colors,
    )
