"""Closed-form privacy accounting and utility metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .budget import BudgetAllocation
from .color import PixelImage
from .errors import InvalidInputError
from .mechanism import FlipProbabilities

MAX_EXACT_DEPTH = 8


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not eps >= 0:
        raise InvalidInputError(f"epsilon must be >= 0, got {eps}")
    return eps


def tv_bound(eps: float) -> float:
    """Largest total-variation distance between outputs of an eps-LDP mechanism.

    Equals ``(e**eps - 1) / (e**eps + 1) = tanh(eps / 2)``.
    """
    return math.tanh(_check_eps(eps) / 2)


def advantage_bound(eps: float) -> float:
    """Upper bound on an identity-distinguishing adversary's advantage over guessing."""
    return tv_bound(eps) / 2


def exact_tv_reduced(eps_bits, x: int, x_prime: int) -> float:
    """Exact TV distance between composed per-bit RR outputs for two inputs.

    Brute-force enumeration over all ``2**d`` output words, so only small
    depths are accepted.

    Args:
        eps_bits: per-bit budgets, ``eps_bits[i]`` for the bit of weight ``2**i``.
        x, x_prime: inputs in ``[0, 2**d)``.

    Returns:
        ``0.5 * sum_y |P(y | x) - P(y | x_prime)|``.
    """
    eps = np.asarray(eps_bits, dtype=np.float64).ravel()
    d = eps.size
    if not 1 <= d <= MAX_EXACT_DEPTH:
        raise InvalidInputError(f"depth must be in 1..{MAX_EXACT_DEPTH}, got {d}")
    if np.any(eps < 0):
        raise InvalidInputError("budgets must be nonnegative")
    for v in (x, x_prime):
        if not 0 <= v < 2**d:
            raise InvalidInputError(f"input {v} out of range for depth {d}")
    probs = FlipProbabilities.from_epsilons(eps)
    words = np.arange(2**d)[:, None]
    out_bits = (words >> np.arange(d)) & 1

    def dist(v):
        in_bits = (v >> np.arange(d)) & 1
        same = out_bits == in_bits
        return np.prod(np.where(same, probs.p_keep, probs.p_flip), axis=1)

    return 0.5 * math.fsum(np.abs(dist(x) - dist(x_prime)))


def blocklevel_to_pixel_epsilon(
    per_coeff_eps: float, block_w: int, block_h: int, channels: int, removed_coeffs: int
) -> float:
    """Per-pixel budget implied by a block-level DCT mechanism under sequential composition.

    Every released coefficient of an 8x8-style block depends on every pixel of
    the block, so a pixel's budget is the sum over released coefficients and
    channels. This is an upper-bound comparison, not a general accountant.
    """
    for name, n in (("block_w", block_w), ("block_h", block_h), ("channels", channels)):
        if int(n) != n or n <= 0:
            raise InvalidInputError(f"{name} must be a positive integer, got {n}")
    if int(removed_coeffs) != removed_coeffs or not 0 <= removed_coeffs < block_w * block_h:
        raise InvalidInputError(f"removed_coeffs must be in [0, {block_w * block_h}), got {removed_coeffs}")
    _check_eps(per_coeff_eps)
    return (block_w * block_h - removed_coeffs) * channels * per_coeff_eps


def strictness_ratio(block_eps: float, eps_total: float) -> float:
    """How many times smaller ``eps_total`` is than a block-level per-pixel budget."""
    if not eps_total > 0:
        raise InvalidInputError("eps_total must be positive")
    return block_eps / eps_total


def psnr(a: PixelImage, b: PixelImage) -> float:
    """Peak signal-to-noise ratio in dB over all samples; ``inf`` for identical images."""
    sa, sb = np.asarray(getattr(a, "samples", a)), np.asarray(getattr(b, "samples", b))
    if sa.shape != sb.shape:
        raise InvalidInputError(f"shape mismatch: {sa.shape} vs {sb.shape}")
    mse = np.mean((sa.astype(np.float64) - sb.astype(np.float64)) ** 2)
    if mse == 0:
        return math.inf
    return 10 * math.log10(255.0**2 / mse)


@dataclass(frozen=True)
class PrivacyReport:
    """Guarantees and bookkeeping of one privatisation run.

    ``epsilon_total`` is the composed per-pixel budget, i.e. the exact sum of
    the allocation; the bounds are evaluated at that value.
    """

    epsilon_total: float
    allocation: BudgetAllocation
    p_keep: np.ndarray
    tv_bound: float
    advantage_bound: float
    psnr_db: float | None = None
    prune: bool = True
    seed: int | None = None

    @property
    def weights(self):
        return self.allocation.weights


def privacy_report(
    alloc: BudgetAllocation,
    *,
    prune: bool = True,
    seed: int | None = None,
    psnr_db: float | None = None,
) -> PrivacyReport:
    eps = alloc.composed_epsilon
    tv = tv_bound(eps)
    return PrivacyReport(
        epsilon_total=eps,
        allocation=alloc,
        p_keep=FlipProbabilities.from_epsilons(alloc.epsilons).p_keep,
        tv_bound=tv,
        advantage_bound=tv / 2,
        psnr_db=psnr_db,
        prune=prune,
        seed=seed,
    )
