/**
 * Model backends the server can expose.
 *
 * The mock backend is deterministic toy behavior for protocol and
 * integration tests: identity paraphrase, bag-of-characters embedding,
 * length score, and a generator whose watermark mode emits genuinely
 * green-biased token streams under the shared hash spec.  Real models
 * (neural generators, paraphrasers, embedders, classifiers) implement the
 * same interface and register here.
 */

import { SplitMix64, MASK64 } from "./hashing.js";
import { greenIndices, surfaceIndex } from "./watermark.js";
import type { GeneratePayload, ParaphrasePayload, Op } from "./protocol.js";

export interface ModelBackend {
  ops: Op[];
  embedDim: number;
  vocabSize: number;
  generate(payload: GeneratePayload): string;
  paraphrase(payload: ParaphrasePayload): string;
  embed(text: string): number[];
  score(text: string): number;
}

const MOCK_VOCAB_SIZE = 256;
const EMBED_DIM = 16;

/**
 * Surfaces chosen so that surfaceIndex(surface) lands on every index
 * exactly once: the workbench re-tokenizes our raw text and hashes each
 * surface, so emitting surface[i] is how the mock "samples token i".
 */
function buildSurfaceTable(vocabSize: number): string[] {
  const table: (string | null)[] = new Array(vocabSize).fill(null);
  let filled = 0;
  for (let n = 0; filled < vocabSize; n++) {
    const surface = `t${n}`;
    const index = surfaceIndex(surface, vocabSize);
    if (table[index] === null) {
      table[index] = surface;
      filled += 1;
    }
  }
  return table as string[];
}

export class MockModel implements ModelBackend {
  ops: Op[] = ["generate", "paraphrase", "embed", "score"];
  embedDim = EMBED_DIM;
  vocabSize = MOCK_VOCAB_SIZE;
  private surfaces = buildSurfaceTable(MOCK_VOCAB_SIZE);

  generate(payload: GeneratePayload): string {
    const rng = new SplitMix64(BigInt(payload.seed) & MASK64);
    const wm = payload.watermark;
    // Probability that the next token is green under a soft watermark
    // with uniform logits: gamma·e^delta / (gamma·e^delta + 1 - gamma).
    const pGreen = wm
      ? (wm.gamma * Math.exp(wm.delta)) / (wm.gamma * Math.exp(wm.delta) + 1 - wm.gamma)
      : 0;
    const out: string[] = [];
    let prev = 0;
    for (let k = 0; k < payload.max_tokens; k++) {
      let index: number;
      if (wm) {
        const green = [...greenIndices(wm.hash_key, prev, this.vocabSize, wm.gamma)].sort(
          (a, b) => a - b,
        );
        const red = [];
        const greenSet = new Set(green);
        for (let i = 0; i < this.vocabSize; i++) if (!greenSet.has(i)) red.push(i);
        const pool = rng.uniform() < pGreen ? green : red;
        index = pool[rng.below(pool.length)];
      } else {
        index = rng.below(this.vocabSize);
      }
      out.push(this.surfaces[index]);
      prev = index;
    }
    return out.join(" ");
  }

  paraphrase(payload: ParaphrasePayload): string {
    return payload.text;
  }

  embed(text: string): number[] {
    const vector = new Array(EMBED_DIM).fill(0);
    for (const byte of Buffer.from(text, "utf8")) {
      vector[byte % EMBED_DIM] += 1;
    }
    return vector;
  }

  score(text: string): number {
    return text.length;
  }
}

export function createModel(spec: string): ModelBackend {
  if (spec === "mock") {
    return new MockModel();
  }
  throw new Error(`unknown model spec ${JSON.stringify(spec)}; available: mock`);
}
