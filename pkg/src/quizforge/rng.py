"""Deterministic, splittable pseudorandom substreams.

Each quiz instance draws from its own substream, derived from
(master seed, instance index) by hashing, then advanced with SplitMix64
(Steele, Lea & Flood 2014; constants below are the reference ones).
Everything here is integer arithmetic on 64-bit words, so streams are
identical across platforms and Python versions. Compatibility with any
other system's RNG streams is a non-goal.

Normal variates use the inverse CDF, so one draw always consumes exactly
one uniform; substream positions never depend on rejection loops.
"""

from __future__ import annotations

import hashlib
import math
import statistics

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_NORMAL = statistics.NormalDist()


def derive_stream(master_seed: int, instance_index: int) -> "RngStream":
    """Substream for one instance; (seed, index) fully determines it."""
    if instance_index < 0:
        raise ValueError("instance index must be >= 0")
    return RngStream(master_seed, instance_index)


class RngStream:
    """One independent 64-bit pseudorandom stream."""

    def __init__(self, master_seed: int, instance_index: int):
        self.master_seed = master_seed
        self.instance_index = instance_index
        h = hashlib.blake2b(digest_size=8)
        h.update((master_seed & _MASK).to_bytes(8, "little"))
        h.update(instance_index.to_bytes(8, "little"))
        self._state = int.from_bytes(h.digest(), "little")

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform01(self) -> float:
        """Uniform in (0, 1); 53-bit resolution, endpoints excluded."""
        return ((self.next_u64() >> 11) + 0.5) / (1 << 53)

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.uniform01()

    def normal(self, mean: float = 0.0, sd: float = 1.0) -> float:
        if sd < 0:
            raise ValueError("sd must be >= 0")
        return mean + sd * _NORMAL.inv_cdf(self.uniform01())

    def randint(self, n: int) -> int:
        """Integer in [0, n) by rejection-free scaled multiply."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def binomial(self, size: int, p: float) -> int:
        """Inverse-CDF binomial draw; one uniform consumed."""
        if size < 0:
            raise ValueError("size must be >= 0")
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        u = self.uniform01()
        if p == 0.0 or size == 0:
            return 0
        if p == 1.0:
            return size
        # pmf walk in log space so q^size underflow cannot stall the cdf
        log_ratio = math.log(p) - math.log1p(-p)
        log_pk = size * math.log1p(-p)
        cdf = math.exp(log_pk)
        k = 0
        while u > cdf and k < size:
            k += 1
            log_pk += math.log((size - k + 1) / k) + log_ratio
            cdf += math.exp(log_pk)
        return k

    def shuffle(self, items: list) -> list:
        """Fisher-Yates on a copy; draw order fixed for reproducibility."""
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.randint(i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def choice_weighted(self, weights: list[float]) -> int:
        total = sum(weights)
        if total <= 0 or any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative with positive sum")
        u = self.uniform01() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if u <= acc:
                return i
        return len(weights) - 1
