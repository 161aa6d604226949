"""Seeded randomness kernel shared by every stage of the workbench.

Everything random in this package bottoms out here, so that runs are
reproducible bit-for-bit and so that other implementations (e.g. the bridge
sidecar) can recompute green lists from the same integers.  The frozen
recipe is:

* ``mix64`` -- the splitmix64 finalizer (Steele, Lea & Flood 2014), a
  published 64-bit avalanche function.
* ``SplitMix64`` -- the splitmix64 stream: ``state += GOLDEN; out = mix64(state)``.
* ``hash_pair(a, b) = mix64((mix64(a) + b) mod 2^64)`` -- order-sensitive
  combination of two integers.
* ``hash_string`` -- FNV-1a 64-bit over UTF-8 bytes.
* permutations via Fisher-Yates driven by ``SplitMix64``, drawing
  ``next_u64() % (i + 1)`` for the swap index.

None of these choices may change without bumping the bridge protocol
version: the shared ``watermark_vectors.json`` test file pins them.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(x: int) -> int:
    """splitmix64 finalizer: avalanche a 64-bit integer."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def hash_pair(a: int, b: int) -> int:
    """Combine two integers into one 64-bit hash (order matters)."""
    return mix64((mix64(a) + (b & MASK64)) & MASK64)


def hash_string(s: str) -> int:
    """FNV-1a 64-bit hash of a string's UTF-8 bytes."""
    h = _FNV_OFFSET
    for byte in s.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


def hash_fields(*parts: int | str) -> int:
    """Fold integers and strings into one seed, left to right."""
    h = GOLDEN
    for part in parts:
        if isinstance(part, str):
            h = hash_pair(h, hash_string(part))
        else:
            h = hash_pair(h, part)
    return h


class SplitMix64:
    """The splitmix64 generator, used wherever the workbench needs a stream.

    Tiny state, trivially portable, and good enough statistically for
    sampling and shuffling at this scale.
    """

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def below(self, n: int) -> int:
        """Integer in [0, n). Plain modulo; bias is irrelevant at our n."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), uniform, in ascending order."""
        if k > n:
            raise ValueError(f"cannot sample {k} from {n}")
        pool = list(range(n))
        self.shuffle(pool)
        return sorted(pool[:k])

    def choice(self, items):
        return items[self.below(len(items))]


def permutation(n: int, seed: int) -> list[int]:
    """Seeded Fisher-Yates permutation of range(n).

    This exact construction is part of the green-list wire contract; see
    the module docstring.
    """
    perm = list(range(n))
    SplitMix64(seed).shuffle(perm)
    return perm
