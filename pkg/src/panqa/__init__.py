"""panqa: quality assessment toolkit for multi-spectral pansharpening."""

from .raster import MultibandImage, load_image, save_image

__all__ = ["MultibandImage", "load_image", "save_image"]

__version__ = "0.1.0"
