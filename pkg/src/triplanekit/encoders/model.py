"""The three modality encoders mapping RGB / RGBD / colored point clouds
into the shared triplane latent space.

All three share the PlaneTokenCore spine (identical parameter names and
shapes) so the depth and point-cloud branches can be warm-started from a
trained RGB branch.
"""
from __future__ import annotations

import numpy as np
import torch
import torch.nn as nn

from ..errors import DataError
from ..geometry.types import ColoredPointCloud
from ..triplane import Triplane
from .blocks import PatchEmbed2d, PlaneTokenCore, assert_finite
from .pointnet import POINT_FEATURE_DIM, PointNet, TriplaneProjection, voxel_pool


def _module_dtype(module: nn.Module) -> torch.dtype:
    return next(module.parameters()).dtype


def _as_tensor(x, dtype: torch.dtype) -> torch.Tensor:
    if isinstance(x, torch.Tensor):
        return x.to(dtype) if x.dtype != dtype else x
    return torch.as_tensor(np.asarray(x), dtype=dtype)


class RgbEncoder(nn.Module):
    """Pure-transformer encoder: patchified RGB image tokens feed
    cross-attention into learned plane tokens."""

    component_tag = "rgb_enc"

    def __init__(self, image_size: int = 64, image_patch: int = 8,
                 channels: int = 16, resolution: int = 32, plane_patch: int = 2,
                 width: int = 256, depth: int = 4, heads: int = 4):
        super().__init__()
        if image_size % image_patch != 0:
            raise ValueError("image_size must be divisible by image_patch")
        self.image_size = image_size
        self.patch_embed = PatchEmbed2d(3, width, image_patch)
        n_tokens = (image_size // image_patch) ** 2
        self.image_pos = nn.Parameter(torch.randn(n_tokens, width) * 0.02)
        self.core = PlaneTokenCore(channels, resolution, plane_patch, width, depth, heads)

    def _image_tokens(self, image) -> torch.Tensor:
        image = _as_tensor(image, _module_dtype(self))
        if image.shape != (self.image_size, self.image_size, 3):
            raise DataError(
                f"expected {self.image_size}x{self.image_size}x3 image, got {tuple(image.shape)}")
        return self.patch_embed(image.permute(2, 0, 1)) + self.image_pos

    def forward(self, image) -> Triplane:
        planes = self.core(self._image_tokens(image))
        return Triplane(planes=assert_finite(planes, "rgb encoder output"))


class RgbdEncoder(nn.Module):
    """RGB tokens as main context plus depth tokens consumed through a second
    cross-attention with residual connection inside every block."""

    component_tag = "rgbd_enc"

    def __init__(self, image_size: int = 64, image_patch: int = 8,
                 channels: int = 16, resolution: int = 32, plane_patch: int = 2,
                 width: int = 256, depth: int = 4, heads: int = 4):
        super().__init__()
        if image_size % image_patch != 0:
            raise ValueError("image_size must be divisible by image_patch")
        self.image_size = image_size
        self.patch_embed = PatchEmbed2d(3, width, image_patch)
        self.depth_patch_embed = PatchEmbed2d(1, width, image_patch)
        n_tokens = (image_size // image_patch) ** 2
        self.image_pos = nn.Parameter(torch.randn(n_tokens, width) * 0.02)
        self.depth_pos = nn.Parameter(torch.randn(n_tokens, width) * 0.02)
        self.core = PlaneTokenCore(channels, resolution, plane_patch, width, depth, heads,
                                   extra_cross=True)

    def forward(self, image, depth) -> Triplane:
        dtype = _module_dtype(self)
        image = _as_tensor(image, dtype)
        depth_map = _as_tensor(depth, dtype)
        if image.shape != (self.image_size, self.image_size, 3):
            raise DataError(
                f"expected {self.image_size}x{self.image_size}x3 image, got {tuple(image.shape)}")
        if depth_map.shape != (self.image_size, self.image_size):
            raise DataError(
                f"depth {tuple(depth_map.shape)} does not match image resolution")
        rgb_tokens = self.patch_embed(image.permute(2, 0, 1)) + self.image_pos
        depth_tokens = self.depth_patch_embed(depth_map.unsqueeze(0)) + self.depth_pos
        planes = self.core(rgb_tokens, extra=depth_tokens)
        return Triplane(planes=assert_finite(planes, "rgbd encoder output"))


class PointCloudEncoder(nn.Module):
    """Colored-point-cloud encoder: PointNet features are mean-pooled into a
    voxel grid, projected to coarse planes that seed the plane tokens, and the
    3D-convolved voxel features are attended to with learned 3D position
    embeddings."""

    component_tag = "pc_enc"

    def __init__(self, grid_size: int = 16, channels: int = 16, resolution: int = 32,
                 plane_patch: int = 2, width: int = 256, depth: int = 4, heads: int = 4,
                 proj_channels: int = 32):
        super().__init__()
        tokens_per_side = resolution // plane_patch
        if grid_size % tokens_per_side != 0:
            raise ValueError(
                f"grid_size {grid_size} must be a multiple of plane token side {tokens_per_side}")
        self.grid_size = grid_size
        self.pointnet = PointNet()
        self.projection = TriplaneProjection(POINT_FEATURE_DIM, proj_channels)
        self.plane_patch_embed = PatchEmbed2d(proj_channels, width,
                                              grid_size // tokens_per_side)
        self.voxel_conv = nn.Conv3d(POINT_FEATURE_DIM, width, kernel_size=3,
                                    stride=2, padding=1)
        m = (grid_size + 1) // 2  # conv output side at stride 2
        self.voxel_pos = nn.Parameter(torch.randn(m ** 3, width) * 0.02)
        self.core = PlaneTokenCore(channels, resolution, plane_patch, width, depth, heads)

    def forward(self, pc) -> Triplane:
        dtype = _module_dtype(self)
        if isinstance(pc, ColoredPointCloud):
            points = torch.as_tensor(pc.points, dtype=dtype)
        else:
            points = _as_tensor(pc, dtype)
        if points.dim() != 2 or points.shape[1] != 6:
            raise DataError(f"expected (n, 6) point cloud, got {tuple(points.shape)}")
        feats = self.pointnet(points)
        grid = voxel_pool(feats, points[:, :3], self.grid_size)
        projected = self.projection(grid)  # (3, proj_channels, N, N)
        token_offset = torch.cat([self.plane_patch_embed(projected[i]) for i in range(3)])
        context = self.voxel_conv(grid.unsqueeze(0)).squeeze(0)
        context = context.flatten(1).transpose(0, 1) + self.voxel_pos
        planes = self.core(context, token_offset=token_offset)
        return Triplane(planes=assert_finite(planes, "point cloud encoder output"))


def warm_start_from(target: nn.Module, source_state: dict) -> list[str]:
    """Copy parameters whose name and shape match from a source state dict.

    Returns the names that were copied. Used to initialize the RGBD and
    point-cloud branches from a trained RGB branch.
    """
    own = target.state_dict()
    copied = []
    for name, value in source_state.items():
        if name in own and own[name].shape == value.shape:
            own[name] = value.to(own[name].dtype)
            copied.append(name)
    target.load_state_dict(own)
    return copied
