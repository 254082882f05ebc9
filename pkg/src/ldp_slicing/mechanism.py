"""Per-bit binary randomized response and the end-to-end privatisation pipeline."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .bitplane import DEPTH, BitPlaneStack, reconstruct, slice_planes
from .budget import BudgetAllocation
from .color import PixelImage, rgb_to_ycbcr, ycbcr_to_rgb
from .errors import InvalidInputError
from .rng import DOMAIN_FLIP_RATE, DOMAIN_PIXELS, RandomnessSpec
from .wavelet import perceptual_obfuscate

_CHUNK = 1 << 22


@dataclass(frozen=True)
class FlipProbabilities:
    """Keep/flip probabilities of randomized response for an array of budgets.

    ``p_flip`` is evaluated directly as ``1 / (e**eps + 1)`` so that it keeps
    full relative precision at large budgets; ``p_keep = 1 - p_flip``.
    """

    p_keep: np.ndarray
    p_flip: np.ndarray

    @classmethod
    def from_epsilons(cls, eps) -> "FlipProbabilities":
        eps = np.asarray(eps, dtype=np.float64)
        if np.any(eps < 0):
            raise InvalidInputError("budgets must be nonnegative")
        p_flip = expit(-eps)
        return cls(1.0 - p_flip, p_flip)


def keep_probability(eps: float) -> float:
    return float(FlipProbabilities.from_epsilons(eps).p_keep)


def rr_bit(bit, eps, draw):
    """Randomized response on bits given uniform draws in [0, 1).

    Keeps the bit when ``draw < p_keep`` and flips it otherwise. All
    arguments broadcast.
    """
    bit = np.asarray(bit)
    if np.any((bit != 0) & (bit != 1)):
        raise InvalidInputError("rr_bit expects bits in {0, 1}")
    keep = np.asarray(draw) < FlipProbabilities.from_epsilons(eps).p_keep
    out = np.where(keep, bit, 1 - bit)
    return int(out) if out.ndim == 0 else out.astype(np.uint8)


def randomize_planes(
    stack: BitPlaneStack,
    alloc: BudgetAllocation,
    rand: RandomnessSpec,
    workers: int = 1,
) -> BitPlaneStack:
    """Apply randomized response with budget ``alloc[c, b]`` to every bit.

    Rows are split into bands for ``workers`` threads; since each draw is
    keyed by its position the result does not depend on the split.
    """
    if alloc.epsilons.shape != (stack.channels, DEPTH):
        raise InvalidInputError(
            f"allocation covers {alloc.epsilons.shape} planes, image has {(stack.channels, DEPTH)}"
        )
    p_keep = FlipProbabilities.from_epsilons(alloc.epsilons).p_keep[:, :, None, None]
    out = stack.packed.copy()
    cols = np.arange(stack.width)

    def band(r0: int, r1: int) -> None:
        draws = rand.image_draws(DOMAIN_PIXELS, stack.channels, np.arange(r0, r1), cols)
        out[:, :, r0:r1] ^= np.packbits(draws >= p_keep, axis=-1)

    workers = max(1, min(int(workers), stack.height))
    edges = np.linspace(0, stack.height, workers + 1).astype(int)
    if workers == 1:
        band(0, stack.height)
    else:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(band, edges[:-1], edges[1:]))
    return BitPlaneStack(out, stack.width, stack.colorspace)


def privatize(
    img: PixelImage,
    alloc: BudgetAllocation,
    rand: RandomnessSpec,
    prune: bool = True,
    workers: int = 1,
):
    """Run the full pipeline on one image.

    colour -> YCbCr, optional LL pruning, bit-plane slicing, per-bit
    randomized response, reconstruction, YCbCr -> RGB. Output has the input's
    shape and bit depth.

    Returns:
        ``(PixelImage, PrivacyReport)``. The report's PSNR compares the output
        with ``img``.

    Raises:
        InvalidInputError: if the allocation's channels do not match the image.
    """
    from .analysis import privacy_report, psnr

    if tuple(alloc.channels) != img.channel_names():
        raise InvalidInputError(
            f"allocation channels {alloc.channels} do not match image channels {img.channel_names()}"
        )
    work = rgb_to_ycbcr(img) if img.colorspace == "RGB" else img
    if prune:
        work = perceptual_obfuscate(work)
    noisy = reconstruct(randomize_planes(slice_planes(work), alloc, rand, workers))
    out = ycbcr_to_rgb(noisy) if img.colorspace == "RGB" else noisy
    report = privacy_report(alloc, prune=prune, seed=rand.seed, psnr_db=psnr(img, out))
    return out, report


def empirical_flip_rate(eps: float, trials: int, rand: RandomnessSpec, *, keep: float | None = None) -> float:
    """Fraction of flipped bits over ``trials`` independent responses.

    ``keep`` overrides the keep probability implied by ``eps``; it exists to
    simulate a mis-calibrated mechanism.
    """
    if trials < 10_000:
        raise InvalidInputError(f"need at least 10^4 trials, got {trials}")
    p_keep = keep_probability(eps) if keep is None else keep
    flips = 0
    for start in range(0, trials, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, trials), dtype=np.uint64)
        flips += int(np.count_nonzero(rand.uniform(DOMAIN_FLIP_RATE, 0, 1, 0, idx) >= p_keep))
    return flips / trials
