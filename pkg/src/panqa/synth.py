"""Deterministic synthetic scenes for self-contained evaluation runs.

The generated pair plays the role of an ideal high-resolution truth: a
4-band reflectance image with piecewise regions, smooth gradients and
texture patches, and a panchromatic band formed as a weighted band sum
plus fine texture. All values lie in [0, 1].
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .raster import MultibandImage

_PAN_WEIGHTS = np.array([0.15, 0.3, 0.3, 0.25])


def synth_scene(seed: int, width: int, height: int
                ) -> tuple[MultibandImage, np.ndarray]:
    """Seeded (ms_truth, pan) pair at the same high resolution."""
    if width % 4 or height % 4:
        raise InputError("width and height must be divisible by 4")
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    yy /= height
    xx /= width

    # random piecewise regions from a coarse Voronoi partition
    n_sites = 12
    sites = rng.random((n_sites, 2))
    base_refl = rng.random((n_sites, 4)) * 0.6 + 0.2
    d2 = ((yy[:, :, None] - sites[None, None, :, 0])**2
          + (xx[:, :, None] - sites[None, None, :, 1])**2)
    region = np.argmin(d2, axis=2)

    bands = []
    for b in range(4):
        plane = base_refl[region, b]
        # smooth illumination gradient
        gx, gy = rng.uniform(-0.15, 0.15, size=2)
        plane = plane + gx * xx + gy * yy
        # band-limited texture: smoothed noise
        noise = rng.standard_normal((height, width))
        for _ in range(2):
            noise = (noise + np.roll(noise, 1, 0) + np.roll(noise, -1, 0)
                     + np.roll(noise, 1, 1) + np.roll(noise, -1, 1)) / 5.0
        plane = plane + 0.05 * noise
        bands.append(plane)
    ms = np.stack(bands, axis=2)

    pan = ms @ _PAN_WEIGHTS
    pan = pan + 0.03 * rng.standard_normal((height, width))

    lo, hi = 0.02, 0.98
    ms = np.clip(ms, lo, hi)
    pan = np.clip(pan, lo, hi)
    return MultibandImage(ms, band_names=["b1", "b2", "b3", "b4"]), pan
