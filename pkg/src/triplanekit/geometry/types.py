"""Core geometry containers: meshes, cameras, views, point clouds, SDF samples."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError


@dataclass
class MeshAsset:
    """Triangle mesh in model coordinates, optionally with per-vertex colors.

    vertices: (V, 3) float array.
    faces: (F, 3) int array, indices into vertices.
    vertex_colors: (V, 3) floats in [0, 1], or None for colorless meshes.
    """

    vertices: np.ndarray
    faces: np.ndarray
    vertex_colors: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64)
        self.faces = np.asarray(self.faces, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise DataError(f"vertices must be (V, 3), got {self.vertices.shape}")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise DataError(f"faces must be (F, 3), got {self.faces.shape}")
        if len(self.faces) and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise DataError("face indices out of range")
        if self.vertex_colors is not None:
            self.vertex_colors = np.asarray(self.vertex_colors, dtype=np.float64)
            if self.vertex_colors.shape != self.vertices.shape:
                raise DataError("vertex_colors must match vertices shape")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def triangles(self) -> np.ndarray:
        """Face corner positions, shape (F, 3, 3)."""
        return self.vertices[self.faces]

    def face_areas(self) -> np.ndarray:
        tri = self.triangles()
        cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)

    def colors_or_gray(self) -> np.ndarray:
        """Vertex colors, defaulting colorless meshes to mid gray."""
        if self.vertex_colors is not None:
            return self.vertex_colors
        return np.full_like(self.vertices, 0.5)


@dataclass
class CameraPose:
    """Camera-to-world pose looking at the origin.

    rotation columns are the camera axes in world space: (right, up, forward),
    with forward pointing from the camera toward the origin. det(rotation) = 1.
    translation is the camera position in world units.
    """

    rotation: np.ndarray
    translation: np.ndarray
    fov_y: float
    resolution: int

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=np.float64)
        self.translation = np.asarray(self.translation, dtype=np.float64)
        if self.rotation.shape != (3, 3):
            raise DataError("rotation must be 3x3")
        if self.translation.shape != (3,):
            raise DataError("translation must be a 3-vector")

    @property
    def position(self) -> np.ndarray:
        return self.translation

    def to_dict(self) -> dict:
        return {
            "rotation": self.rotation.reshape(-1).tolist(),
            "translation": self.translation.tolist(),
            "fov_y": float(self.fov_y),
            "resolution": int(self.resolution),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraPose":
        return cls(
            rotation=np.asarray(d["rotation"], dtype=np.float64).reshape(3, 3),
            translation=np.asarray(d["translation"], dtype=np.float64),
            fov_y=float(d["fov_y"]),
            resolution=int(d["resolution"]),
        )


@dataclass
class MultiViewSample:
    """One rendered view: RGB in [0,1], camera-distance depth (0 = miss), binary mask.

    Ground-truth renders hold numpy arrays and satisfy mask == (depth > 0)
    exactly. Differentiable renders reuse this container with torch tensors
    and a soft mask.
    """

    rgb: object
    depth: object
    mask: object
    camera: CameraPose


@dataclass
class ColoredPointCloud:
    """Surface samples as an (n, 6) array: normalized XYZ in [-0.5, 0.5], RGB in [0, 1]."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != 6:
            raise DataError(f"point cloud must be (n, 6), got {self.points.shape}")
        if len(self.points) == 0:
            raise DataError("point cloud must be non-empty")

    @property
    def xyz(self) -> np.ndarray:
        return self.points[:, :3]

    @property
    def rgb(self) -> np.ndarray:
        return self.points[:, 3:]

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class SDFSampleSet:
    """Signed-distance supervision points, sorted outside-first.

    query_points: (M, 3); sdf_values: (M,), negative inside;
    split_index: number of positive (outside) samples, i.e. rows
    [0, split_index) are outside and [split_index, M) are inside.
    """

    query_points: np.ndarray
    sdf_values: np.ndarray
    split_index: int = field(default=-1)

    def __post_init__(self):
        self.query_points = np.asarray(self.query_points, dtype=np.float64)
        self.sdf_values = np.asarray(self.sdf_values, dtype=np.float64)
        if len(self.query_points) != len(self.sdf_values):
            raise DataError("query_points and sdf_values must align")
        if self.split_index < 0:
            order = np.argsort(self.sdf_values <= 0, kind="stable")
            self.query_points = self.query_points[order]
            self.sdf_values = self.sdf_values[order]
            self.split_index = int(np.count_nonzero(self.sdf_values > 0))

    @property
    def outside(self) -> np.ndarray:
        return self.sdf_values[: self.split_index]

    @property
    def inside(self) -> np.ndarray:
        return self.sdf_values[self.split_index:]

    def __len__(self) -> int:
        return len(self.sdf_values)
