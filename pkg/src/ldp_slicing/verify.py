"""Statistical certification of the per-bit LDP guarantee.

For a plane with budget eps the mechanism is run many times on input 0 and on
input 1. The two output distributions are estimated with exact
(Clopper-Pearson) binomial intervals, and the largest log-likelihood ratio
over the two singleton outcomes is bounded from below. A plane passes when
that lower bound does not exceed the claimed eps, i.e. the data give no
evidence that the mechanism leaks more than claimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta

from .analysis import psnr
from .budget import BudgetAllocation, WeightTable, allocate
from .color import PixelImage
from .errors import CertificationFailure, InvalidInputError
from .mechanism import keep_probability, privatize
from .rng import DOMAIN_CERTIFY, RandomnessSpec

MIN_TRIALS = 100_000
MAX_TRIALS = 2**32
_CHUNK = 1 << 22


@dataclass(frozen=True)
class LdpTestResult:
    channel: str
    bit: int
    claimed_epsilon: float
    estimate: float
    ci_low: float
    ci_high: float
    passed: bool
    trials: int
    confidence: float

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        for k in ("estimate", "ci_low", "ci_high"):
            if math.isinf(d[k]):
                d[k] = "inf"
        return d


def clopper_pearson(k: int, n: int, alpha: float) -> tuple[float, float]:
    """Exact two-sided ``1 - alpha`` interval for a binomial proportion."""
    lo = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def _log_ratio_range(a: tuple[float, float], b: tuple[float, float]) -> tuple[float, float]:
    # Range of |log(p / q)| over the box p in a, q in b.
    (alo, ahi), (blo, bhi) = a, b
    with np.errstate(divide="ignore"):
        if alo > bhi:
            low = math.log(alo / bhi)
        elif blo > ahi:
            low = math.log(blo / ahi)
        else:
            low = 0.0
        high = max(
            math.log(ahi / blo) if blo > 0 else math.inf,
            math.log(bhi / alo) if alo > 0 else math.inf,
        )
    return low, high


def _abs_log(p: float, q: float) -> float:
    if p == q:
        return 0.0
    if p == 0 or q == 0:
        return math.inf
    return abs(math.log(p / q))


def _count_zero_outputs(rand: RandomnessSpec, channel: int, b: int, input_bit: int, trials: int, p_keep: float) -> int:
    # Output is 0 when input 0 is kept or input 1 is flipped.
    zeros = 0
    for start in range(0, trials, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, trials), dtype=np.uint64)
        keep = rand.uniform(DOMAIN_CERTIFY, channel, b, input_bit, idx) < p_keep
        zeros += int(np.count_nonzero(keep if input_bit == 0 else ~keep))
    return zeros


def certify_bit_ldp(
    eps: float,
    trials: int,
    rand: RandomnessSpec,
    confidence: float = 0.999,
    *,
    channel: str = "GRAY",
    channel_index: int = 0,
    bit: int = 1,
    keep: float | None = None,
) -> LdpTestResult:
    """Test one randomized-response plane against its claimed budget.

    Args:
        eps: claimed budget in nats.
        trials: responses drawn per input value.
        rand: randomness for the test; results are reproducible under it.
        confidence: joint coverage of the two binomial intervals.
        channel, channel_index, bit: plane identity; selects the random stream.
        keep: actual keep probability of the mechanism under test. Defaults to
            the calibrated ``e**eps / (e**eps + 1)``; set it to simulate a
            mis-calibrated plane.

    Raises:
        InvalidInputError: for too few trials or a confidence outside (0.9, 1).
    """
    if not MIN_TRIALS <= trials <= MAX_TRIALS:
        raise InvalidInputError(f"trials must be in [{MIN_TRIALS}, 2**32], got {trials}")
    if not 0.9 < confidence < 1:
        raise InvalidInputError(f"confidence must be in (0.9, 1), got {confidence}")
    if eps < 0:
        raise InvalidInputError("claimed epsilon must be >= 0")
    p_keep = keep_probability(eps) if keep is None else float(keep)

    k0 = _count_zero_outputs(rand, channel_index, bit, 0, trials, p_keep)
    k1 = _count_zero_outputs(rand, channel_index, bit, 1, trials, p_keep)
    # Split the error budget over the two intervals (union bound).
    alpha = (1 - confidence) / 2
    ci0 = clopper_pearson(k0, trials, alpha)
    ci1 = clopper_pearson(k1, trials, alpha)
    zero = _log_ratio_range(ci0, ci1)
    one = _log_ratio_range((1 - ci0[1], 1 - ci0[0]), (1 - ci1[1], 1 - ci1[0]))
    q0, q1 = k0 / trials, k1 / trials
    estimate = max(_abs_log(q0, q1), _abs_log(1 - q0, 1 - q1))
    ci_low = max(zero[0], one[0])
    ci_high = max(zero[1], one[1])
    return LdpTestResult(
        channel=channel,
        bit=bit,
        claimed_epsilon=float(eps),
        estimate=estimate,
        ci_low=ci_low,
        ci_high=ci_high,
        passed=bool(ci_low <= eps),
        trials=trials,
        confidence=confidence,
    )


def certify_pixel_pipeline(
    alloc: BudgetAllocation,
    trials: int,
    rand: RandomnessSpec,
    confidence: float = 0.999,
    *,
    keep_overrides: dict | None = None,
) -> list[LdpTestResult]:
    """Certify every plane of an allocation with a Bonferroni-corrected confidence.

    The per-pixel budget follows by composition as ``alloc.composed_epsilon``;
    composition itself is not re-tested.

    Args:
        keep_overrides: ``{(channel, b): p_keep}`` planes to run mis-calibrated.

    Raises:
        CertificationFailure: if any plane fails; carries all results.
    """
    keep_overrides = keep_overrides or {}
    planes = list(alloc.planes())
    per_plane = 1 - (1 - confidence) / len(planes)
    results = []
    for c, b, eps in planes:
        results.append(
            certify_bit_ldp(
                eps,
                trials,
                rand,
                per_plane,
                channel=c,
                channel_index=alloc.channels.index(c),
                bit=b,
                keep=keep_overrides.get((c, b)),
            )
        )
    failed = [r for r in results if not r.passed]
    if failed:
        raise CertificationFailure(results, failed)
    return results


@dataclass(frozen=True)
class PsnrSweep:
    """Mean PSNR per budget over several seeds."""

    epsilons: list[float]
    means: list[float]
    stderrs: list[float]
    samples: list[list[float]] = field(repr=False)

    @property
    def pooled_stderr(self) -> float:
        finite = [s for s in self.stderrs if math.isfinite(s)]
        return math.sqrt(sum(s * s for s in finite) / len(finite)) if finite else 0.0

    @property
    def monotone(self) -> bool:
        """Non-decreasing up to one pooled standard error between neighbours."""
        tol = self.pooled_stderr
        return all(b >= a - tol for a, b in zip(self.means, self.means[1:]))


def monotone_psnr_sweep(
    img: PixelImage,
    epsilons,
    seeds: int,
    *,
    weights: WeightTable | None = None,
    prune: bool = True,
    rand: RandomnessSpec | None = None,
    reference: str = "mechanism_input",
) -> PsnrSweep:
    """PSNR of privatised outputs across a budget sweep.

    Args:
        reference: ``"mechanism_input"`` compares against the noise-free
            pipeline output (pruned, colour round-tripped), isolating the
            randomisation's distortion; ``"original"`` compares against ``img``.
    """
    epsilons = [float(e) for e in epsilons]
    if len(epsilons) < 3 or seeds < 5:
        raise InvalidInputError("need at least 3 budgets and 5 seeds")
    if reference not in ("mechanism_input", "original"):
        raise InvalidInputError(f"unknown reference {reference!r}")
    weights = weights or WeightTable.for_channels(img.channel_names())
    rand = rand or RandomnessSpec(0)
    if reference == "original":
        ref = img
    else:
        ref, _ = privatize(img, _noiseless(weights), rand, prune=prune)

    samples = []
    for eps in epsilons:
        alloc = allocate(eps, weights)
        vals = []
        for s in range(seeds):
            out, _ = privatize(img, alloc, rand.derive(f"sweep/{s}"), prune=prune)
            vals.append(psnr(ref, out))
        samples.append(vals)
    means, stderrs = [], []
    for vals in samples:
        arr = np.asarray(vals)
        if np.all(np.isinf(arr)):
            means.append(math.inf)
            stderrs.append(0.0)
        else:
            means.append(float(arr.mean()))
            stderrs.append(float(arr.std(ddof=1) / math.sqrt(arr.size)))
    return PsnrSweep(epsilons, means, stderrs, samples)


def _noiseless(weights: WeightTable) -> BudgetAllocation:
    # Budgets large enough that p_flip underflows below the 53-bit draw grid.
    eps = np.full(weights.matrix.shape, 1e6)
    return BudgetAllocation(float(eps.sum()), eps, weights)
