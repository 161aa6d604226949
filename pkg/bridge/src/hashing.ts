/**
 * The frozen 64-bit randomness kernel, mirrored bit-for-bit from the main
 * workbench: splitmix64 finalizer and stream (Steele, Lea & Flood 2014)
 * plus FNV-1a for strings.  The shared watermark_vectors.json file at the
 * repository root pins this agreement; do not touch without regenerating
 * it on both sides.
 */

export const MASK64 = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;
const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;

export function mix64(x: bigint): bigint {
  let z = x & MASK64;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return z ^ (z >> 31n);
}

export function hashPair(a: bigint, b: bigint): bigint {
  return mix64((mix64(a) + (b & MASK64)) & MASK64);
}

export function fnv1a64(s: string): bigint {
  let h = FNV_OFFSET;
  for (const byte of Buffer.from(s, "utf8")) {
    h = ((h ^ BigInt(byte)) * FNV_PRIME) & MASK64;
  }
  return h;
}

export class SplitMix64 {
  private state: bigint;

  constructor(seed: bigint) {
    this.state = seed & MASK64;
  }

  nextU64(): bigint {
    this.state = (this.state + GOLDEN) & MASK64;
    return mix64(this.state);
  }

  /** Integer in [0, n); plain modulo, same as the workbench. */
  below(n: number): number {
    if (n <= 0) throw new Error("below() needs n >= 1");
    return Number(this.nextU64() % BigInt(n));
  }

  /** Uniform float in [0, 1) with 53 bits. */
  uniform(): number {
    return Number(this.nextU64() >> 11n) / 2 ** 53;
  }
}
