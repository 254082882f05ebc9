"""One-level orthonormal 2-D Haar transform and LL-band pruning."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .color import PixelImage, quantize
from .errors import InvalidInputError


@dataclass(frozen=True)
class SubbandSet:
    """Haar sub-bands of a single channel.

    ``lh`` holds horizontal (column-to-column) differences, ``hl`` vertical
    (row-to-row) differences. ``shape`` is the source shape before edge padding.
    """

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray
    shape: tuple[int, int]

    @property
    def padding(self) -> tuple[int, int]:
        return self.shape[0] % 2, self.shape[1] % 2


def haar_dwt(channel) -> SubbandSet:
    """Analyse a 2-D real matrix into LL/LH/HL/HH.

    Odd dimensions are padded by edge replication; the padding is undone by
    :func:`haar_idwt`.
    """
    x = np.asarray(channel, dtype=np.float64)
    if x.ndim != 2 or x.size == 0:
        raise InvalidInputError(f"haar_dwt expects a non-empty 2-D matrix, got shape {x.shape}")
    shape = x.shape
    if shape[0] % 2 or shape[1] % 2:
        x = np.pad(x, ((0, shape[0] % 2), (0, shape[1] % 2)), mode="edge")
    a = x[0::2, 0::2]
    b = x[0::2, 1::2]
    c = x[1::2, 0::2]
    d = x[1::2, 1::2]
    return SubbandSet(
        ll=(a + b + c + d) / 2,
        lh=(a - b + c - d) / 2,
        hl=(a + b - c - d) / 2,
        hh=(a - b - c + d) / 2,
        shape=shape,
    )


def haar_idwt(bands: SubbandSet) -> np.ndarray:
    """Synthesise the channel from its sub-bands, cropped to the original shape."""
    ll, lh, hl, hh = (np.asarray(m, dtype=np.float64) for m in (bands.ll, bands.lh, bands.hl, bands.hh))
    if not (ll.shape == lh.shape == hl.shape == hh.shape) or ll.ndim != 2:
        raise InvalidInputError("sub-bands must be 2-D matrices of identical shape")
    h, w = bands.shape
    if ll.shape != ((h + 1) // 2, (w + 1) // 2):
        raise InvalidInputError(f"sub-band shape {ll.shape} does not match source shape {bands.shape}")
    out = np.empty((2 * ll.shape[0], 2 * ll.shape[1]))
    out[0::2, 0::2] = (ll + lh + hl + hh) / 2
    out[0::2, 1::2] = (ll - lh + hl - hh) / 2
    out[1::2, 0::2] = (ll + lh - hl - hh) / 2
    out[1::2, 1::2] = (ll - lh - hl + hh) / 2
    return out[:h, :w]


def ll_prune(bands: SubbandSet) -> SubbandSet:
    """Zero the approximation band; detail bands are shared, not copied."""
    return replace(bands, ll=np.zeros_like(bands.ll))


def perceptual_obfuscate(img: PixelImage) -> PixelImage:
    """Remove each channel's LL band and requantise to 8 bits.

    Deterministic and data-independent in its parameters, so it consumes no
    privacy budget.
    """
    out = np.empty_like(img.samples)
    for ch in range(img.channels):
        residual = haar_idwt(ll_prune(haar_dwt(img.samples[:, :, ch])))
        out[:, :, ch] = quantize(residual)
    return PixelImage(out, img.colorspace)
