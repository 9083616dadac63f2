"""Seeded random streams with a pinned algorithm.

Every stochastic draw in the engine goes through :class:`RngStream`, which
wraps the Mersenne Twister (a fixed, cross-platform algorithm) and derives
the Gaussian via an explicit Box-Muller transform rather than whatever the
host library's gauss() happens to do.  Child streams are derived with a
keyed blake2b hash so per-thread generation is order-independent.
"""

from __future__ import annotations

import hashlib
import math
import random

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *parts) -> int:
    """Stable 64-bit child seed from a parent seed and a label path."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed & _MASK64).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "big")


def stable_text_seed(*texts: str) -> int:
    """Stable 64-bit seed from text inputs (used by the mock backend)."""
    h = hashlib.blake2b(digest_size=8)
    for text in texts:
        h.update(text.encode("utf-8", "replace"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


class RngStream:
    """A seeded pseudo-random stream with a documented set of draws."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._r = random.Random(self.seed)

    def uniform(self) -> float:
        """One double in [0, 1)."""
        return self._r.random()

    def gauss(self, mean: float, stdev: float) -> float:
        """One Gaussian draw via Box-Muller (two uniforms per draw)."""
        if stdev == 0:
            return mean
        u1 = self._r.random()
        u2 = self._r.random()
        # random() can return exactly 0.0; log needs a positive argument
        z = math.sqrt(-2.0 * math.log(u1 or 5e-324)) * math.cos(2.0 * math.pi * u2)
        return mean + stdev * z

    def randrange(self, n: int) -> int:
        """Uniform index in [0, n)."""
        return self._r.randrange(n)

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def bits64(self) -> int:
        return self._r.getrandbits(64)

    def token(self, nbytes: int = 8) -> str:
        """Deterministic opaque hex identifier."""
        return self._r.getrandbits(nbytes * 8).to_bytes(nbytes, "big").hex()

    def child(self, *parts) -> "RngStream":
        """Independent stream keyed by a label path under this seed."""
        return RngStream(derive_seed(self.seed, *parts))

    def shuffle(self, seq: list) -> None:
        self._r.shuffle(seq)
