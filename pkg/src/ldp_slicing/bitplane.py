"""Bit-plane slicing of 8-bit images and reconstruction from (privatised) planes.

Planes are indexed by significance ``b`` in 1..8, where plane ``b`` carries
weight ``2**(b - 1)`` (``b = 8`` is the MSB). The MSB-first index ``l`` used
in textbook bit extraction maps to ``b = 9 - l``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .color import PixelImage
from .errors import InvalidInputError

DEPTH = 8
BITS = tuple(range(1, DEPTH + 1))
# (8, 1) shift column: axis 1 of the stack is b - 1.
_SHIFTS = np.arange(DEPTH, dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class BitPlaneStack:
    """Packed binary planes of an image.

    Attributes:
        packed: ``uint8`` array of shape ``(channels, 8, height, ceil(width / 8))``;
            axis 1 is indexed by ``b - 1``. Bits are packed big-endian along rows.
        width: unpacked row length.
        colorspace: tag restored on reconstruction.
    """

    packed: np.ndarray
    width: int
    colorspace: str

    @property
    def channels(self) -> int:
        return self.packed.shape[0]

    @property
    def height(self) -> int:
        return self.packed.shape[2]

    @property
    def plane_count(self) -> int:
        return self.channels * DEPTH

    def bits(self) -> np.ndarray:
        """All planes unpacked, shape ``(channels, 8, height, width)``."""
        return np.unpackbits(self.packed, axis=-1, count=self.width)

    def plane(self, channel: int, b: int) -> np.ndarray:
        """Unpacked plane of significance ``b`` for a channel index."""
        if b not in BITS:
            raise InvalidInputError(f"bit significance must be in 1..8, got {b}")
        return np.unpackbits(self.packed[channel, b - 1], axis=-1, count=self.width)

    @classmethod
    def from_bits(cls, bits, colorspace: str) -> "BitPlaneStack":
        """Pack a ``(channels, 8, height, width)`` 0/1 array.

        Raises:
            InvalidInputError: on wrong shape or entries other than 0 and 1.
        """
        bits = np.asarray(bits)
        if bits.ndim != 4 or bits.shape[1] != DEPTH:
            raise InvalidInputError(f"expected shape (C, 8, H, W), got {bits.shape}")
        if bits.size and (bits.min() < 0 or bits.max() > 1):
            raise InvalidInputError("bit planes must contain only 0 and 1")
        return cls(np.packbits(bits.astype(np.uint8), axis=-1), bits.shape[3], colorspace)


def slice_planes(img: PixelImage) -> BitPlaneStack:
    """Decompose every sample into its eight binary digits."""
    chw = np.moveaxis(img.samples, 2, 0)
    bits = (chw[:, None, :, :] >> _SHIFTS[None, :, None, None]) & 1
    return BitPlaneStack(np.packbits(bits, axis=-1), img.width, img.colorspace)


def reconstruct(stack: BitPlaneStack) -> PixelImage:
    """Weighted sum of planes, ``x = sum_b 2**(b-1) * bit_b``."""
    bits = stack.bits()
    if bits.shape[1] != DEPTH:
        raise InvalidInputError(f"stack must hold {DEPTH} planes per channel")
    # packbits in reverse significance order gives MSB-first bytes: the pixel value.
    values = np.packbits(bits[:, ::-1], axis=1)[:, 0]
    return PixelImage(np.moveaxis(values, 0, 2), stack.colorspace)
