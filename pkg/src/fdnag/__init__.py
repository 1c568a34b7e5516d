"""Network-free architecture generation by fitness-guided denoising."""

__version__ = "0.1.0"
