from .types import (
    CameraPose,
    ColoredPointCloud,
    MeshAsset,
    MultiViewSample,
    SDFSampleSet,
)
from .mesh import (
    export_obj,
    export_ply,
    is_watertight,
    load_and_normalize_mesh,
    load_mesh,
    normalize_mesh,
)
from .cameras import camera_rays, look_at_origin, make_camera_set
from .render import render_views
from .sampling import (
    sample_colored_point_cloud,
    sample_sdf_points,
    sample_surface,
    signed_distance,
)

__all__ = [
    "CameraPose",
    "ColoredPointCloud",
    "MeshAsset",
    "MultiViewSample",
    "SDFSampleSet",
    "camera_rays",
    "export_obj",
    "export_ply",
    "is_watertight",
    "load_and_normalize_mesh",
    "load_mesh",
    "look_at_origin",
    "make_camera_set",
    "normalize_mesh",
    "render_views",
    "sample_colored_point_cloud",
    "sample_sdf_points",
    "sample_surface",
    "signed_distance",
]
