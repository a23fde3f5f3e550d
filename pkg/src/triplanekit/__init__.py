"""triplanekit: multi-modal triplane coding, latent diffusion, and mesh generation."""

__version__ = "0.1.0"
