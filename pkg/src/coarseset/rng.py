"""Deterministic PRNG used everywhere randomness is needed.

The generator is xoshiro256++ with its four 64-bit state words expanded from
the user seed by splitmix64. Both algorithms are published reference
constructions, so any reimplementation (other languages included) that
follows the consumption rules below reproduces every stream bit-for-bit:

* ``next_uint64``    -- one xoshiro256++ output.
* ``uniform01``      -- ``(next_uint64() >> 11) * 2**-53``, in [0, 1).
* ``below(bound)``   -- unbiased bounded integer via rejection sampling:
  draw ``x = next_uint64()`` until ``x < 2**64 - (2**64 % bound)``, then
  return ``x % bound``.
* ``normals(count)`` -- Box-Muller pairs. Per pair: ``u1`` from
  ``((next_uint64() >> 11) + 1) * 2**-53`` (in (0, 1]), ``u2`` from
  ``uniform01``; emit ``r*cos(2*pi*u2)`` then ``r*sin(2*pi*u2)`` with
  ``r = sqrt(-2*ln(u1))``. An odd ``count`` still consumes a full final
  pair and discards its second value.
* ``shuffle``        -- ascending Fisher-Yates: for i in 0..n-2 swap
  ``a[i]`` with ``a[i + below(n - i)]``.
* ``sample``         -- the first k steps of the same Fisher-Yates walk.

The integer and uniform streams are exactly portable. ``normals`` addition-
ally depends on libm's log/cos/sin, which are typically but not provably
correctly rounded; identical platforms reproduce identical values.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_TWO53_INV = 2.0 ** -53


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output)."""
    state = (state + _SPLITMIX_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Rng:
    """xoshiro256++ stream seeded via splitmix64 expansion of one u64 seed."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError(f"rng seed must be non-negative, got {seed}")
        sm = seed & _MASK64
        sm, self._s0 = _splitmix64(sm)
        sm, self._s1 = _splitmix64(sm)
        sm, self._s2 = _splitmix64(sm)
        sm, self._s3 = _splitmix64(sm)

    def next_uint64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        result = (_rotl((s0 + s3) & _MASK64, 23) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def uniform01(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * _TWO53_INV

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform01()

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) by rejection sampling."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_uint64()
            if x < limit:
                return x % bound

    def normals(self, count: int) -> list[float]:
        """`count` standard normals via Box-Muller (see module docstring)."""
        if count < 0:
            raise ValueError(f"count must be non-negative, got {count}")
        out: list[float] = []
        for _ in range((count + 1) // 2):
            u1 = ((self.next_uint64() >> 11) + 1) * _TWO53_INV
            u2 = self.uniform01()
            r = math.sqrt(-2.0 * math.log(u1))
            theta = 2.0 * math.pi * u2
            out.append(r * math.cos(theta))
            out.append(r * math.sin(theta))
        del out[count:]
        return out

    def shuffle(self, items: list) -> None:
        """In-place ascending Fisher-Yates."""
        n = len(items)
        for i in range(n - 1):
            j = i + self.below(n - i)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> list[int]:
        items = list(range(n))
        self.shuffle(items)
        return items

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct indices from [0, n): the first k Fisher-Yates steps."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        items = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]
