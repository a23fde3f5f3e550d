"""Transformer building blocks shared by the modality encoders."""
from __future__ import annotations

import torch
import torch.nn as nn


def assert_finite(x: torch.Tensor, where: str) -> torch.Tensor:
    if not torch.isfinite(x).all():
        raise RuntimeError(f"non-finite activations after {where}")
    return x


class Attention(nn.Module):
    """Multi-head attention over (seq, width) tensors (no batch dimension)."""

    def __init__(self, width: int, heads: int):
        super().__init__()
        if width % heads != 0:
            raise ValueError("width must be divisible by heads")
        self.heads = heads
        self.head_dim = width // heads
        self.to_q = nn.Linear(width, width)
        self.to_k = nn.Linear(width, width)
        self.to_v = nn.Linear(width, width)
        self.proj = nn.Linear(width, width)

    def forward(self, q_in: torch.Tensor, kv_in: torch.Tensor) -> torch.Tensor:
        nq, _ = q_in.shape
        nk, _ = kv_in.shape
        q = self.to_q(q_in).reshape(nq, self.heads, self.head_dim).transpose(0, 1)
        k = self.to_k(kv_in).reshape(nk, self.heads, self.head_dim).transpose(0, 1)
        v = self.to_v(kv_in).reshape(nk, self.heads, self.head_dim).transpose(0, 1)
        scores = q @ k.transpose(1, 2) / self.head_dim ** 0.5
        attn = scores.softmax(dim=-1)
        out = (attn @ v).transpose(0, 1).reshape(nq, -1)
        return self.proj(out)


class EncoderBlock(nn.Module):
    """Pre-norm block: self-attention, cross-attention to context, optional
    second cross-attention to an extra stream (all residual), then MLP."""

    def __init__(self, width: int, heads: int, mlp_ratio: float = 4.0,
                 extra_cross: bool = False):
        super().__init__()
        self.norm_self = nn.LayerNorm(width)
        self.self_attn = Attention(width, heads)
        self.norm_q = nn.LayerNorm(width)
        self.norm_ctx = nn.LayerNorm(width)
        self.cross_attn = Attention(width, heads)
        if extra_cross:
            self.norm_q_extra = nn.LayerNorm(width)
            self.norm_extra = nn.LayerNorm(width)
            self.extra_attn = Attention(width, heads)
        else:
            self.extra_attn = None
        hidden = int(width * mlp_ratio)
        self.norm_mlp = nn.LayerNorm(width)
        self.mlp = nn.Sequential(nn.Linear(width, hidden), nn.GELU(), nn.Linear(hidden, width))

    def forward(self, x: torch.Tensor, context: torch.Tensor,
                extra: torch.Tensor | None = None) -> torch.Tensor:
        h = self.norm_self(x)
        x = x + self.self_attn(h, h)
        x = x + self.cross_attn(self.norm_q(x), self.norm_ctx(context))
        if extra is not None:
            if self.extra_attn is None:
                raise RuntimeError("block was built without an extra cross-attention stream")
            x = x + self.extra_attn(self.norm_q_extra(x), self.norm_extra(extra))
        x = x + self.mlp(self.norm_mlp(x))
        return x


class PlaneTokenCore(nn.Module):
    """Learned plane-token queries refined by transformer blocks, then
    unpatchified into the (3, C, R, R) triplane.

    This spine is architecturally identical across the three encoders so
    stage-B training can warm-start from the RGB branch by name.
    """

    def __init__(self, channels: int, resolution: int, plane_patch: int,
                 width: int, depth: int, heads: int, extra_cross: bool = False):
        super().__init__()
        if resolution % plane_patch != 0:
            raise ValueError("plane resolution must be divisible by plane_patch")
        self.channels = channels
        self.resolution = resolution
        self.plane_patch = plane_patch
        self.tokens_per_side = resolution // plane_patch
        n_tokens = 3 * self.tokens_per_side ** 2
        self.plane_tokens = nn.Parameter(torch.randn(n_tokens, width) * 0.02)
        self.blocks = nn.ModuleList([
            EncoderBlock(width, heads, extra_cross=extra_cross) for _ in range(depth)
        ])
        self.norm_out = nn.LayerNorm(width)
        self.unpatchify = nn.Linear(width, channels * plane_patch * plane_patch)

    def forward(self, context: torch.Tensor, extra: torch.Tensor | None = None,
                token_offset: torch.Tensor | None = None) -> torch.Tensor:
        x = self.plane_tokens
        if token_offset is not None:
            x = x + token_offset
        for i, block in enumerate(self.blocks):
            x = assert_finite(block(x, context, extra=extra), f"encoder block {i}")
        x = self.unpatchify(self.norm_out(x))
        t, p, c = self.tokens_per_side, self.plane_patch, self.channels
        x = x.reshape(3, t, t, c, p, p)
        x = x.permute(0, 3, 1, 4, 2, 5).reshape(3, c, t * p, t * p)
        return x


class PatchEmbed2d(nn.Module):
    """Convolutional patchifier: (C, H, W) -> (n_tokens, width)."""

    def __init__(self, in_channels: int, width: int, patch: int):
        super().__init__()
        self.patch = patch
        self.proj = nn.Conv2d(in_channels, width, kernel_size=patch, stride=patch)

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        if image.dim() != 3:
            raise ValueError(f"expected (C, H, W), got {tuple(image.shape)}")
        x = self.proj(image.unsqueeze(0)).squeeze(0)  # (width, h', w')
        return x.flatten(1).transpose(0, 1)
