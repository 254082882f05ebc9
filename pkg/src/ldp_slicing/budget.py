"""Utility-aware split of a per-pixel privacy budget across bit-planes.

Minimises ``sum W[c, b] / eps[c, b]`` subject to ``sum eps = eps_total``.
The optimum allocates in proportion to ``sqrt(W)``; :func:`solve_numeric`
reaches the same point by bisecting on the Lagrange multiplier and is kept
as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericFailure

COLOR_CHANNELS = ("Y", "Cb", "Cr")
GRAY_CHANNELS = ("GRAY",)
DEFAULT_COLOR_WEIGHTS = (4.0, 1.0, 1.0)
SIGNIFICANCE_WEIGHTS = tuple(float(2 ** (b - 1)) for b in range(1, 9))


@dataclass(frozen=True)
class WeightTable:
    """Importance weights ``W[c, b] = channel_weights[c] * bit_weights[b]``.

    Rows follow ``channels``; column ``j`` is the plane of significance ``j + 1``.
    """

    channels: tuple[str, ...] = COLOR_CHANNELS
    channel_weights: tuple[float, ...] = DEFAULT_COLOR_WEIGHTS
    bit_weights: tuple[float, ...] = SIGNIFICANCE_WEIGHTS

    def __post_init__(self):
        if len(self.channels) != len(self.channel_weights):
            raise InvalidInputError("one weight per channel is required")
        if not self.bit_weights:
            raise InvalidInputError("at least one bit weight is required")
        weights = self.channel_weights + self.bit_weights
        if not all(math.isfinite(w) and w > 0 for w in weights):
            raise InvalidInputError(f"weights must be finite and strictly positive, got {weights}")

    @classmethod
    def color(cls, ratio=DEFAULT_COLOR_WEIGHTS) -> "WeightTable":
        return cls(COLOR_CHANNELS, tuple(float(r) for r in ratio))

    @classmethod
    def gray(cls) -> "WeightTable":
        return cls(GRAY_CHANNELS, (1.0,))

    @classmethod
    def for_channels(cls, channels, ratio=DEFAULT_COLOR_WEIGHTS) -> "WeightTable":
        return cls.gray() if tuple(channels) == GRAY_CHANNELS else cls.color(ratio)

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.channel_weights, self.bit_weights)

    def to_dict(self) -> dict:
        return {
            "channels": list(self.channels),
            "channel_weights": list(self.channel_weights),
            "bit_weights": list(self.bit_weights),
        }


@dataclass(frozen=True)
class BudgetAllocation:
    """Per-plane budgets in nats; ``epsilons[i, b - 1]`` belongs to ``channels[i]``."""

    epsilon_total: float
    epsilons: np.ndarray
    weights: WeightTable = field(default_factory=WeightTable)

    def __post_init__(self):
        eps = np.array(self.epsilons, dtype=np.float64)
        if eps.shape != self.weights.matrix.shape:
            raise InvalidInputError(f"allocation shape {eps.shape} does not match weights")
        if np.any(eps < 0) or not np.all(np.isfinite(eps)):
            raise InvalidInputError("per-plane budgets must be finite and nonnegative")
        eps.flags.writeable = False
        object.__setattr__(self, "epsilons", eps)

    @property
    def channels(self) -> tuple[str, ...]:
        return self.weights.channels

    @property
    def composed_epsilon(self) -> float:
        """Per-pixel budget under basic composition: the sum over all planes."""
        return math.fsum(self.epsilons.ravel())

    def get(self, channel: str, b: int) -> float:
        return float(self.epsilons[self.channels.index(channel), b - 1])

    def planes(self):
        """Yield ``(channel, b, epsilon)`` for every plane."""
        for i, c in enumerate(self.channels):
            for j in range(self.epsilons.shape[1]):
                yield c, j + 1, float(self.epsilons[i, j])

    def objective(self) -> float:
        """Weighted distortion ``sum W / eps`` (infinite if any plane has zero budget)."""
        with np.errstate(divide="ignore"):
            return float(np.sum(self.weights.matrix / self.epsilons))


def allocate(epsilon_total: float, weights: WeightTable | None = None) -> BudgetAllocation:
    """Closed-form optimal allocation, proportional to ``sqrt(W)``.

    Raises:
        InvalidInputError: if ``epsilon_total`` is negative or not finite.
    """
    weights = weights or WeightTable()
    epsilon_total = float(epsilon_total)
    if not math.isfinite(epsilon_total) or epsilon_total < 0:
        raise InvalidInputError(f"epsilon_total must be finite and >= 0, got {epsilon_total}")
    root = np.sqrt(weights.matrix)
    eps = epsilon_total * root / math.fsum(root.ravel())
    return BudgetAllocation(epsilon_total, eps, weights)


def uniform_allocation(epsilon_total: float, weights: WeightTable | None = None) -> BudgetAllocation:
    """Equal budget on every plane; the naive baseline."""
    weights = weights or WeightTable()
    if epsilon_total < 0:
        raise InvalidInputError(f"epsilon_total must be >= 0, got {epsilon_total}")
    shape = weights.matrix.shape
    return BudgetAllocation(epsilon_total, np.full(shape, epsilon_total / (shape[0] * shape[1])), weights)


def solve_numeric(
    epsilon_total: float,
    weights: WeightTable | None = None,
    *,
    tol: float = 1e-15,
    max_iter: int = 400,
) -> BudgetAllocation:
    """Minimise the weighted distortion by bisection on the multiplier.

    For a fixed multiplier ``lam`` each plane's Lagrangian term
    ``W / eps + lam * eps`` is minimised independently; the spent budget is
    decreasing in ``lam``, so bisection on ``log(lam)`` finds the multiplier
    that spends exactly ``epsilon_total``.

    Raises:
        InvalidInputError: if ``epsilon_total`` is not positive.
        NumericFailure: if the bracket does not close within ``max_iter`` steps.
    """
    weights = weights or WeightTable()
    if not epsilon_total > 0:
        raise InvalidInputError(f"solve_numeric needs epsilon_total > 0, got {epsilon_total}")
    W = weights.matrix

    def spent(log_lam):
        return math.fsum(_plane_minimiser(W, math.exp(log_lam)).ravel())

    lo, hi = -50.0, 50.0
    while spent(lo) < epsilon_total and lo > -650.0:
        lo -= 50.0
    while spent(hi) > epsilon_total and hi < 650.0:
        hi += 50.0
    if not spent(lo) >= epsilon_total >= spent(hi):
        raise NumericFailure("could not bracket the Lagrange multiplier")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if spent(mid) > epsilon_total:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    else:
        raise NumericFailure(f"bisection did not converge in {max_iter} iterations")

    eps = _plane_minimiser(W, math.exp(0.5 * (lo + hi)))
    # Residual budget from the finite bracket is spread pro rata.
    eps *= epsilon_total / math.fsum(eps.ravel())
    return BudgetAllocation(float(epsilon_total), eps, weights)


def _plane_minimiser(W: np.ndarray, lam: float, iters: int = 100) -> np.ndarray:
    """Root of ``lam - W / e**2`` per entry: the stationary point of ``W/e + lam*e``.

    Newton's method on this concave increasing function converges
    monotonically when started left of the root, so the start is bracketed
    by powers of 16 first.
    """
    e = np.ones_like(W)
    while np.any(right := lam * e * e < W):
        e = np.where(right, e * 16.0, e)
    while np.any(left := lam * e * e >= W):
        e = np.where(left, e / 16.0, e)
    for _ in range(iters):
        e_new = np.maximum(1.5 * e - lam * e**3 / (2.0 * W), e)
        if np.array_equal(e_new, e):
            return e
        e = e_new
    raise NumericFailure("per-plane Newton iteration did not converge")
