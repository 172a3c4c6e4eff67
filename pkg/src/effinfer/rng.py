"""Seeded, splittable pseudo-random source.

The generator is SplitMix64 (Steele, Lea & Flood, "Fast splittable
pseudorandom number generators", OOPSLA 2014): a 64-bit Weyl sequence with
increment ``0x9E3779B97F4A7C15`` passed through the variant-13 finaliser.
Child sources are seeded from one parent output pushed through the MurmurHash3
``fmix64`` finaliser, so splitting is deterministic and the child stream does
not replay the parent's own outputs.

Everything is plain Python integer arithmetic, so streams are bit-identical
across platforms.
"""

from __future__ import annotations

__all__ = ["RandomSource", "as_source"]

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_TO_UNIT = 2.0**-53


def _fmix64(z: int) -> int:
    z = ((z ^ (z >> 33)) * 0xFF51AFD7ED558CCD) & _MASK
    z = ((z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53) & _MASK
    return z ^ (z >> 33)


class RandomSource:
    """Single-owner stream of uniforms in ``[0, 1)``.

    Never share one source between concurrent consumers; hand each consumer
    its own child from :meth:`spawn` or :meth:`split`.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self._state = self.seed

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed:#x})"

    def next_uint64(self) -> int:
        self._state = z = (self._state + _GAMMA) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def next_uniform(self) -> float:
        # top 53 bits -> exactly representable multiples of 2**-53
        return (self.next_uint64() >> 11) * _TO_UNIT

    def spawn(self) -> RandomSource:
        return RandomSource(_fmix64(self.next_uint64()))

    def split(self, k: int) -> list[RandomSource]:
        """Return ``k`` child sources; child ``i`` depends only on the parent
        state and ``i``."""
        return [self.spawn() for _ in range(k)]


def as_source(seed: int | RandomSource) -> RandomSource:
    if isinstance(seed, RandomSource):
        return seed
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise TypeError(f"seed must be an int or RandomSource, got {type(seed).__name__}")
    return RandomSource(seed)
