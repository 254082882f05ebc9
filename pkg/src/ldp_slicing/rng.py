"""Counter-based uniform draws (Philox4x32-10) keyed by position.

Every draw is a pure function of the 64-bit seed and a counter tuple, so an
image can be split across workers in any order and still produce the same
bits. Counter layout for one Philox block::

    word0 = column (or trial index)
    word1 = row (or input bit)
    word2 = channel * 4 + (b - 1) // 2
    word3 = stream domain

Each block yields 128 bits: words (0, 1) form the 53-bit draw for the odd
plane of the pair, words (2, 3) the draw for the even plane.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)

DOMAIN_PIXELS = 0
DOMAIN_CERTIFY = 1
DOMAIN_FLIP_RATE = 2


def philox4x32(c0, c1, c2, c3, k0: int, k1: int, rounds: int = 10):
    """Philox4x32 bijection (Salmon et al., 2011) over broadcastable counter arrays.

    Returns four ``uint64`` arrays each holding a 32-bit output word.
    """
    x0, x1, x2, x3 = (
        np.array(c, dtype=np.uint64, order="C") for c in np.broadcast_arrays(c0, c1, c2, c3)
    )
    p0 = np.empty_like(x0)
    p1 = np.empty_like(x0)
    for r in range(rounds):
        ka = np.uint64((k0 + r * _W0) & 0xFFFFFFFF)
        kb = np.uint64((k1 + r * _W1) & 0xFFFFFFFF)
        np.multiply(x0, _M0, out=p0)
        np.multiply(x2, _M1, out=p1)
        np.right_shift(p1, _S32, out=x0)
        x0 ^= x1
        x0 ^= ka
        np.right_shift(p0, _S32, out=x2)
        x2 ^= x3
        x2 ^= kb
        np.bitwise_and(p1, _LO32, out=x1)
        np.bitwise_and(p0, _LO32, out=x3)
    return x0, x1, x2, x3


def _to_unit(hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    # 27 + 26 bits -> uniform on [0, 1) with 53-bit resolution.
    return ((hi >> np.uint64(5)) * 67108864.0 + (lo >> np.uint64(6))) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class RandomnessSpec:
    """Master seed for all randomness of one privatisation or test run."""

    seed: int

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def fresh(cls) -> "RandomnessSpec":
        return cls(secrets.randbits(64))

    @property
    def key(self) -> tuple[int, int]:
        s = int(self.seed)
        return s & 0xFFFFFFFF, s >> 32

    def derive(self, label: str) -> "RandomnessSpec":
        """Child spec for a named sub-stream, e.g. one file of a batch."""
        h = hashlib.blake2b(label.encode(), key=int(self.seed).to_bytes(8, "little"), digest_size=8)
        return RandomnessSpec(int.from_bytes(h.digest(), "little"))

    def plane_pair(self, domain: int, channel: int, pair: int, rows, cols):
        """Draws for planes ``2*pair + 1`` and ``2*pair + 2`` at the given positions.

        ``rows`` and ``cols`` broadcast against each other.
        """
        k0, k1 = self.key
        w0, w1, w2, w3 = philox4x32(cols, rows, channel * 4 + pair, domain, k0, k1)
        return _to_unit(w0, w1), _to_unit(w2, w3)

    def image_draws(self, domain: int, channels: int, rows, cols) -> np.ndarray:
        """Draws for every plane of every channel, shape ``(channels, 8, len(rows), len(cols))``.

        Identical to calling :meth:`plane_pair` per channel and pair, but done
        in a single vectorised pass.
        """
        rows = np.asarray(rows, dtype=np.uint64).reshape(1, -1, 1)
        cols = np.asarray(cols, dtype=np.uint64).reshape(1, 1, -1)
        streams = np.arange(channels * 4, dtype=np.uint64).reshape(-1, 1, 1)
        k0, k1 = self.key
        w0, w1, w2, w3 = philox4x32(cols, rows, streams, domain, k0, k1)
        out = np.empty((channels, 8, rows.shape[1], cols.shape[2]))
        out[:, 0::2] = _to_unit(w0, w1).reshape(channels, 4, rows.shape[1], cols.shape[2])
        out[:, 1::2] = _to_unit(w2, w3).reshape(channels, 4, rows.shape[1], cols.shape[2])
        return out

    def uniform(self, domain: int, channel: int, b: int, rows, cols) -> np.ndarray:
        """Draws for a single plane of significance ``b``."""
        if not 1 <= b <= 8:
            raise InvalidInputError(f"bit significance must be in 1..8, got {b}")
        odd, even = self.plane_pair(domain, channel, (b - 1) // 2, rows, cols)
        return odd if b % 2 == 1 else even
