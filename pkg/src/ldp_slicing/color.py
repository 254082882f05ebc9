"""8-bit image container and full-range BT.601 (JPEG/JFIF) colour conversion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

COLORSPACES = ("RGB", "YCbCr", "GRAY")

# JFIF full-range matrices. Offsets of 128 apply to the chroma rows.
RGB_TO_YCBCR = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)
YCBCR_TO_RGB = np.array(
    [
        [1.0, 0.0, 1.402],
        [1.0, -0.344136, -0.714136],
        [1.0, 1.772, 0.0],
    ]
)
CHROMA_OFFSET = np.array([0.0, 128.0, 128.0])


@dataclass(frozen=True, eq=False)
class PixelImage:
    """An 8-bit raster with a colourspace tag.

    ``samples`` is a row-major ``uint8`` array of shape ``(height, width, channels)``.
    """

    samples: np.ndarray
    colorspace: str

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim == 2:
            s = s[:, :, None]
        if s.ndim != 3 or s.shape[0] == 0 or s.shape[1] == 0:
            raise InvalidInputError(f"expected a non-empty (H, W, C) array, got shape {s.shape}")
        if self.colorspace not in COLORSPACES:
            raise InvalidInputError(f"unknown colorspace {self.colorspace!r}")
        channels = s.shape[2]
        if channels not in (1, 3) or (channels == 1) != (self.colorspace == "GRAY"):
            raise InvalidInputError(
                f"{self.colorspace} image cannot have {channels} channel(s)"
            )
        if s.dtype != np.uint8:
            if not np.issubdtype(s.dtype, np.integer):
                raise InvalidInputError(f"samples must be integers, got {s.dtype}")
            if s.min() < 0 or s.max() > 255:
                raise InvalidInputError("samples must lie in [0, 255]")
            s = s.astype(np.uint8)
        s = np.ascontiguousarray(s)
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.samples.shape

    def channel_names(self) -> tuple[str, ...]:
        """Names of the channels the budget is allocated over."""
        return ("GRAY",) if self.channels == 1 else ("Y", "Cb", "Cr")

    def __eq__(self, other):
        if not isinstance(other, PixelImage):
            return NotImplemented
        return self.colorspace == other.colorspace and np.array_equal(self.samples, other.samples)

    def __repr__(self):
        return f"PixelImage({self.height}x{self.width}x{self.channels}, {self.colorspace})"


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize(x: np.ndarray) -> np.ndarray:
    """Round half away from zero and clamp to ``uint8``."""
    return np.clip(round_half_away(x), 0, 255).astype(np.uint8)


def rgb_to_ycbcr(img: PixelImage) -> PixelImage:
    """Convert an RGB image to full-range YCbCr.

    Raises:
        InvalidInputError: if ``img`` is not a 3-channel RGB image.
    """
    if img.colorspace != "RGB":
        raise InvalidInputError(f"rgb_to_ycbcr expects RGB, got {img.colorspace}")
    ycc = img.samples.astype(np.float64) @ RGB_TO_YCBCR.T + CHROMA_OFFSET
    return PixelImage(quantize(ycc), "YCbCr")


def ycbcr_to_rgb(img: PixelImage) -> PixelImage:
    """Inverse of :func:`rgb_to_ycbcr`, with the same round-and-clamp."""
    if img.colorspace != "YCbCr":
        raise InvalidInputError(f"ycbcr_to_rgb expects YCbCr, got {img.colorspace}")
    rgb = (img.samples.astype(np.float64) - CHROMA_OFFSET) @ YCBCR_TO_RGB.T
    return PixelImage(quantize(rgb), "RGB")


def to_grayscale(img: PixelImage) -> PixelImage:
    """Luma plane of a colour image as a GRAY image; GRAY input is returned as is."""
    if img.colorspace == "GRAY":
        return img
    if img.colorspace == "RGB":
        img = rgb_to_ycbcr(img)
    return PixelImage(img.samples[:, :, :1].copy(), "GRAY")
