"""Point-cloud feature path: per-point features, voxel mean-pooling, plane projection."""
from __future__ import annotations

import numpy as np
import torch
import torch.nn as nn

from ..errors import DataError

POINT_FEATURE_DIM = 64


class PointNet(nn.Module):
    """Per-point MLP with a global max-pooled feature concatenated back in.

    Maps (n, 6) colored points to (n, 64) features; equivariant to row
    permutation because every per-point op shares weights and the global
    reduction is a max.
    """

    def __init__(self, in_dim: int = 6, feat_dim: int = POINT_FEATURE_DIM, hidden: int = 128):
        super().__init__()
        self.point_mlp = nn.Sequential(
            nn.Linear(in_dim, hidden), nn.ReLU(), nn.Linear(hidden, hidden))
        self.fuse = nn.Linear(2 * hidden, feat_dim)

    def forward(self, points: torch.Tensor) -> torch.Tensor:
        if points.dim() != 2 or points.shape[1] != 6:
            raise DataError(f"expected (n, 6) points, got {tuple(points.shape)}")
        if points.shape[0] == 0:
            raise DataError("point cloud is empty")
        h = self.point_mlp(points)
        g = h.max(dim=0).values
        return self.fuse(torch.cat([h, g.expand(h.shape[0], -1)], dim=1))


def cell_indices(coords: np.ndarray, grid_size: int) -> np.ndarray:
    """Map coordinates in [-0.5, 0.5] to integer cells; +0.5 clamps into the last cell."""
    idx = np.floor((coords + 0.5) * grid_size).astype(np.int64)
    return np.clip(idx, 0, grid_size - 1)


class _VoxelMeanPool(torch.autograd.Function):
    """Mean of member point features per grid cell, empty cells zero.

    Members of each cell are accumulated sequentially in lexicographic order
    of (cell, coordinates, features), which makes the result deterministic
    and bit-identical under any permutation of the input rows.
    """

    @staticmethod
    def forward(ctx, feats: torch.Tensor, coords: torch.Tensor, grid_size: int):
        feats_np = feats.detach().cpu().numpy()
        coords_np = coords.detach().cpu().numpy()
        n, c = feats_np.shape
        cells = cell_indices(coords_np, grid_size)
        flat = (cells[:, 0] * grid_size + cells[:, 1]) * grid_size + cells[:, 2]
        # canonical member order: lexsort uses its LAST key as primary
        keys = tuple(feats_np[:, j] for j in range(c - 1, -1, -1)) + (
            coords_np[:, 2], coords_np[:, 1], coords_np[:, 0], flat)
        order = np.lexsort(keys)
        acc = np.zeros((grid_size ** 3, c), dtype=feats_np.dtype)
        np.add.at(acc, flat[order], feats_np[order])
        counts = np.bincount(flat, minlength=grid_size ** 3)
        occupied = counts > 0
        acc[occupied] /= counts[occupied, None]
        grid = acc.T.reshape(c, grid_size, grid_size, grid_size)
        ctx.save_for_backward(torch.from_numpy(flat), torch.from_numpy(counts))
        ctx.grid_size = grid_size
        ctx.feat_dtype = feats.dtype
        return torch.from_numpy(grid).to(feats.dtype)

    @staticmethod
    def backward(ctx, grad_grid: torch.Tensor):
        flat, counts = ctx.saved_tensors
        g = grad_grid.reshape(grad_grid.shape[0], -1).transpose(0, 1)  # (cells, C)
        grad_feats = g[flat] / counts[flat].unsqueeze(1).to(g.dtype)
        return grad_feats.to(ctx.feat_dtype), None, None


def voxel_pool(feats: torch.Tensor, coords: torch.Tensor, grid_size: int) -> torch.Tensor:
    """Pool (n, C) point features into a (C, N, N, N) grid of per-cell means.

    Differentiable w.r.t. feats; the cell assignment itself has no gradient.
    """
    if grid_size <= 0:
        raise DataError("grid_size must be positive")
    if feats.dim() != 2 or coords.dim() != 2 or coords.shape[1] != 3:
        raise DataError("expected feats (n, C) and coords (n, 3)")
    if feats.shape[0] != coords.shape[0]:
        raise DataError("feats and coords must have the same row count")
    return _VoxelMeanPool.apply(feats, coords, grid_size)


def axis_mean_planes(grid: torch.Tensor) -> torch.Tensor:
    """Collapse a (C, X, Y, Z) grid to three planes by averaging along one axis.

    Returns (3, C, N, N) in [YZ, XZ, XY] order, i.e. means over X, Y and Z.
    """
    if grid.dim() != 4:
        raise DataError(f"expected (C, N, N, N) grid, got {tuple(grid.shape)}")
    return torch.stack([grid.mean(dim=1), grid.mean(dim=2), grid.mean(dim=3)], dim=0)


class TriplaneProjection(nn.Module):
    """Axis-mean then one convolution per plane: (C, N, N, N) -> (3, C_out, N, N)."""

    def __init__(self, in_channels: int = POINT_FEATURE_DIM, out_channels: int = 32):
        super().__init__()
        self.conv_yz = nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1)
        self.conv_xz = nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1)
        self.conv_xy = nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1)

    def forward(self, grid: torch.Tensor) -> torch.Tensor:
        planes = axis_mean_planes(grid)
        batched = planes.unsqueeze(1)  # (3, 1, C, N, N)
        out = torch.stack([
            self.conv_yz(batched[0]).squeeze(0),
            self.conv_xz(batched[1]).squeeze(0),
            self.conv_xy(batched[2]).squeeze(0),
        ], dim=0)
        return out
