from .model import PointCloudEncoder, RgbdEncoder, RgbEncoder, warm_start_from
from .pointnet import (
    POINT_FEATURE_DIM,
    PointNet,
    TriplaneProjection,
    axis_mean_planes,
    cell_indices,
    voxel_pool,
)

__all__ = [
    "POINT_FEATURE_DIM",
    "PointCloudEncoder",
    "PointNet",
    "RgbEncoder",
    "RgbdEncoder",
    "TriplaneProjection",
    "axis_mean_planes",
    "cell_indices",
    "voxel_pool",
    "warm_start_from",
]
