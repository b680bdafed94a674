"""
Counter-based SplitMix64 generator

Output ``i`` (0-based) of the stream seeded with ``s`` is ``mix(s + (i + 1) * G)``
with ``G = 0x9E3779B97F4A7C15`` and

    mix(z) = z3 ^ (z3 >> 31)
    z1 = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z3 = (z1 ^ (z1 >> 27)) * 0x94D049BB133111EB

all arithmetic modulo 2^64. Uniform doubles are ``(x >> 11) * 2^-53``. The stream is
a pure function of (seed, position), so it is reproducible in any language.
"""

from typing import Tuple

import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start, ..., start + count - 1`` of the stream, as uint64"""
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK) + counters * GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * MIX_1
        z = (z ^ (z >> np.uint64(27))) * MIX_2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """
    Sequential view of the counter-based stream

    Attributes:
        seed: Stream seed
        position: Number of outputs consumed so far
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.position = 0

    def next_uint64(self, count: int) -> np.ndarray:
        values = splitmix64(self.seed, self.position, count)
        self.position += count
        return values

    def uniform(self, count: int) -> np.ndarray:
        """Doubles in [0, 1) with 53 random bits"""
        return (self.next_uint64(count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def uniform_disc(self, radius: float, count: int) -> np.ndarray:
        """
        ``count`` points uniform on the closed disc of given radius

        Candidates are consecutive pairs of uniforms mapped to the bounding square
        and rejected outside the disc; the stream position ends right after the
        last accepted pair.
        """
        accepted = []
        total = 0
        while total < count:
            batch = max(2 * (count - total), 16)
            start = self.position
            u = self.uniform(2 * batch).reshape(batch, 2)
            points = (2.0 * u - 1.0) * radius
            inside = np.einsum("ij,ij->i", points, points) <= radius * radius
            kept_index = np.flatnonzero(inside)[: count - total]
            accepted.append(points[kept_index])
            total += kept_index.size
            if total == count and kept_index.size:
                self.position = start + 2 * (int(kept_index[-1]) + 1)
        return np.concatenate(accepted, axis=0) if accepted else np.empty((0, 2))

    def state(self) -> Tuple[int, int]:
        return self.seed, self.position

    def __repr__(self) -> str:
        return f"SplitMix64(seed={self.seed}, position={self.position})"
