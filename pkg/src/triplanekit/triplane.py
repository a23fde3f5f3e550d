"""The shared triplane latent: three axis-aligned feature planes.

Plane order is fixed as [YZ, XZ, XY]; a 3D point (x, y, z) reads plane 0 at
(y, z), plane 1 at (x, z), and plane 2 at (x, y). Every modality encoder
emits this container and the shared decoder consumes it.
"""
from __future__ import annotations

from dataclasses import dataclass

import torch

from .errors import DataError

PLANE_NAMES = ("yz", "xz", "xy")
# per plane, the cube axes that index its two spatial dimensions
PLANE_AXES = ((1, 2), (0, 2), (0, 1))


@dataclass
class Triplane:
    """planes: (3, C, R, R) feature tensor in [YZ, XZ, XY] order."""

    planes: torch.Tensor

    def __post_init__(self):
        if self.planes.dim() != 4 or self.planes.shape[0] != 3:
            raise DataError(f"triplane must be (3, C, R, R), got {tuple(self.planes.shape)}")
        if self.planes.shape[2] != self.planes.shape[3]:
            raise DataError("triplane planes must be square")
        if not torch.isfinite(self.planes).all():
            raise DataError("triplane contains non-finite values")

    @property
    def channels(self) -> int:
        return self.planes.shape[1]

    @property
    def resolution(self) -> int:
        return self.planes.shape[2]

    def stacked(self) -> torch.Tensor:
        """Channel-stack the planes into one (3*C, R, R) tensor."""
        return self.planes.reshape(-1, self.resolution, self.resolution)

    @classmethod
    def from_stacked(cls, stacked: torch.Tensor) -> "Triplane":
        if stacked.dim() != 3 or stacked.shape[0] % 3 != 0:
            raise DataError(f"stacked triplane must be (3*C, R, R), got {tuple(stacked.shape)}")
        c = stacked.shape[0] // 3
        return cls(planes=stacked.reshape(3, c, stacked.shape[1], stacked.shape[2]))

    def detach(self) -> "Triplane":
        return Triplane(planes=self.planes.detach())

    def to(self, *args, **kwargs) -> "Triplane":
        return Triplane(planes=self.planes.to(*args, **kwargs))
