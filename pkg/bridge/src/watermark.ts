/**
 * Green-list computation and scoring, matching the workbench exactly:
 * seed = hashPair(hash_key, prev_token), Fisher-Yates permutation driven
 * by splitmix64, first floor(gamma * V + 0.5) indices are green.
 */

import { SplitMix64, fnv1a64, hashPair } from "./hashing.js";

export function greenSize(gamma: number, vocabSize: number): number {
  return Math.floor(gamma * vocabSize + 0.5);
}

export function greenIndices(
  hashKey: number,
  prevToken: number,
  vocabSize: number,
  gamma: number,
): Set<number> {
  const rng = new SplitMix64(hashPair(BigInt(hashKey), BigInt(prevToken)));
  const perm = Array.from({ length: vocabSize }, (_, i) => i);
  for (let i = vocabSize - 1; i > 0; i--) {
    const j = rng.below(i + 1);
    [perm[i], perm[j]] = [perm[j], perm[i]];
  }
  return new Set(perm.slice(0, greenSize(gamma, vocabSize)));
}

/** Out-of-vocabulary surface indexing, identical to the workbench scorer. */
export function surfaceIndex(surface: string, vocabSize: number): number {
  return Number(fnv1a64(surface) % BigInt(vocabSize));
}

export interface GreenCount {
  scored: number;
  green: number;
}

/** Count green tokens over positions 1..n-1 of whitespace-split text. */
export function countGreen(
  text: string,
  hashKey: number,
  vocabSize: number,
  gamma: number,
): GreenCount {
  const tokens = text.split(/\s+/).filter((t) => t.length > 0);
  let green = 0;
  for (let t = 1; t < tokens.length; t++) {
    const prev = surfaceIndex(tokens[t - 1], vocabSize);
    if (greenIndices(hashKey, prev, vocabSize, gamma).has(surfaceIndex(tokens[t], vocabSize))) {
      green += 1;
    }
  }
  return { scored: Math.max(0, tokens.length - 1), green };
}
