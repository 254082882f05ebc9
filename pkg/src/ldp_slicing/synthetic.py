"""Deterministic synthetic test images with natural-image statistics."""

from __future__ import annotations

import numpy as np

from .color import PixelImage, quantize


def natural_image(size: int = 112, seed: int = 0, color: bool = True) -> PixelImage:
    """Smooth shading, a few soft blobs and 1/f texture, like a small photo crop.

    The same ``(size, seed, color)`` always gives the same image.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / max(size - 1, 1)
    channels = 3 if color else 1

    base = rng.uniform(70, 170, channels)
    tilt = rng.uniform(-50, 50, (2, channels))
    img = base + xx[..., None] * tilt[0] + yy[..., None] * tilt[1]

    for _ in range(5):
        cy, cx = rng.uniform(0.15, 0.85, 2)
        ry, rx = rng.uniform(0.08, 0.3, 2)
        amp = rng.uniform(-70, 70, channels)
        img += amp * np.exp(-(((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2))[..., None]

    # Pink noise: white noise shaped by 1/f in the frequency domain.
    f = np.hypot(*np.meshgrid(np.fft.fftfreq(size), np.fft.fftfreq(size), indexing="ij"))
    f[0, 0] = 1.0
    for ch in range(channels):
        spec = np.fft.fft2(rng.standard_normal((size, size))) / f
        tex = np.real(np.fft.ifft2(spec))
        img[..., ch] += 12 * tex / tex.std()

    return PixelImage(quantize(img), "RGB" if color else "GRAY")
