"""Green-list/red-list token watermark: bias generation, score suspects.

Partition rule (frozen, part of the cross-component wire contract):

1. ``seed = hash_pair(hash_key, prev_token)`` with the splitmix64-based
   pair hash from :mod:`wmpb.hashing`.
2. Fisher-Yates permute ``range(vocab_size)`` with a ``SplitMix64`` stream
   seeded by that value.
3. The first ``floor(gamma * vocab_size + 0.5)`` permuted indices are the
   green list.

Scoring counts, for every position after the first, whether the token
falls in the green list derived from its predecessor, then applies a
one-proportion z-test against the null rate gamma:

    z = (s_G - gamma * T) / sqrt(T * gamma * (1 - gamma))

with a one-sided normal tail for the p-value.  The first token is never
scored; it has no predecessor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionError, TooShortError
from .hashing import hash_pair, permutation


@dataclass(frozen=True)
class WatermarkParams:
    gamma: float = 0.5
    delta: float = 2.0
    hash_key: int = 15485863

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("gamma must be in (0, 1)")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")


@dataclass(frozen=True)
class GreenPartition:
    green: frozenset[int]
    red: frozenset[int]


@dataclass(frozen=True)
class WatermarkScore:
    scored_tokens: int
    green_count: int
    z: float
    p_value: float

    def to_json(self) -> dict:
        return {
            "T": self.scored_tokens,
            "green_count": self.green_count,
            "z": self.z,
            "p_value": self.p_value,
        }


def green_size(gamma: float, vocab_size: int) -> int:
    """round(gamma * V) with half-up rounding, fixed across platforms."""
    return int(math.floor(gamma * vocab_size + 0.5))


@lru_cache(maxsize=65536)
def _green_indices(hash_key: int, prev_token: int, vocab_size: int, gamma: float) -> frozenset[int]:
    seed = hash_pair(hash_key, prev_token)
    perm = permutation(vocab_size, seed)
    return frozenset(perm[: green_size(gamma, vocab_size)])


def green_partition(prev_token: int, params: WatermarkParams, vocab_size: int) -> GreenPartition:
    """Deterministic vocabulary split keyed on the previous token."""
    if vocab_size < 2:
        raise ValueError("vocab_size must be >= 2")
    green = _green_indices(params.hash_key, prev_token, vocab_size, params.gamma)
    red = frozenset(range(vocab_size)) - green
    return GreenPartition(green=green, red=red)


def apply_bias(dist: np.ndarray, partition: GreenPartition, delta: float) -> np.ndarray:
    """Add delta to the green logits; red logits pass through untouched."""
    size = len(partition.green) + len(partition.red)
    if len(dist) != size:
        raise DimensionError(f"distribution has {len(dist)} entries, partition covers {size}")
    out = dist.copy()
    out[list(partition.green)] += delta
    return out


class WatermarkLogitBias:
    """Logit transform for generation; caches one bias mask per prev token."""

    def __init__(self, params: WatermarkParams, vocab_size: int):
        self.params = params
        self.vocab_size = vocab_size
        self._masks: dict[int, np.ndarray] = {}

    def _mask(self, prev_token: int) -> np.ndarray:
        mask = self._masks.get(prev_token)
        if mask is None:
            green = _green_indices(self.params.hash_key, prev_token, self.vocab_size, self.params.gamma)
            mask = np.zeros(self.vocab_size, dtype=np.float64)
            mask[list(green)] = self.params.delta
            self._masks[prev_token] = mask
        return mask

    def __call__(self, logits: np.ndarray, context: Sequence[int]) -> np.ndarray:
        if len(logits) != self.vocab_size:
            raise DimensionError("logit vector does not match the watermark vocabulary size")
        return logits + self._mask(context[-1])


def compute_z(green_count: int, scored_tokens: int, gamma: float) -> float:
    expected = gamma * scored_tokens
    spread = math.sqrt(scored_tokens * gamma * (1.0 - gamma))
    return (green_count - expected) / spread


def score_text(tokens: Sequence[int], params: WatermarkParams, vocab_size: int) -> WatermarkScore:
    """Count green tokens over positions 1..T and z-test against gamma."""
    if len(tokens) < 2:
        raise TooShortError(f"need at least 2 tokens to score, got {len(tokens)}")
    scored = len(tokens) - 1
    green_count = 0
    for t in range(1, len(tokens)):
        green = _green_indices(params.hash_key, tokens[t - 1], vocab_size, params.gamma)
        if tokens[t] in green:
            green_count += 1
    z = compute_z(green_count, scored, params.gamma)
    p_value = 0.5 * math.erfc(z / math.sqrt(2.0))
    return WatermarkScore(scored_tokens=scored, green_count=green_count, z=z, p_value=p_value)


def is_watermarked(score: WatermarkScore, z_threshold: float = 4.0) -> tuple[bool, str]:
    """Strictly-greater threshold rule; returns (flag, origin label)."""
    flagged = score.z > z_threshold
    return flagged, ("LLM" if flagged else "HUMAN")
