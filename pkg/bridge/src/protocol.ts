/**
 * Wire types for the wmpb/1 line protocol.
 *
 * One JSON object per line, UTF-8, no length prefixes.  The server writes
 * a handshake line first, then answers requests one-for-one, in order.
 */

export const PROTOCOL = "wmpb/1";

export type Op = "generate" | "paraphrase" | "embed" | "score";

export interface Handshake {
  protocol: typeof PROTOCOL;
  ops: Op[];
  embed_dim?: number;
  vocab_size?: number;
}

export interface WatermarkSpec {
  gamma: number;
  delta: number;
  hash_key: number;
}

export interface GeneratePayload {
  prompt_text: string;
  max_tokens: number;
  seed: number;
  watermark?: WatermarkSpec;
}

export interface ParaphrasePayload {
  text: string;
  round: number;
  seed: number;
}

export interface EmbedPayload {
  text: string;
}

export interface ScorePayload {
  text: string;
}

export interface BridgeRequest {
  op: Op;
  id: string;
  payload: GeneratePayload | ParaphrasePayload | EmbedPayload | ScorePayload;
}

export interface BridgeResponse {
  id: string | null;
  ok: boolean;
  result?: { text: string } | { vector: number[] } | { score: number };
  error?: string;
}

const OP_FIELDS: Record<Op, string[]> = {
  generate: ["prompt_text", "max_tokens", "seed"],
  paraphrase: ["text", "round", "seed"],
  embed: ["text"],
  score: ["text"],
};

/** Throws with a readable message when the request shape is off. */
export function validateRequest(value: unknown): BridgeRequest {
  if (typeof value !== "object" || value === null) {
    throw new Error("request must be a JSON object");
  }
  const obj = value as Record<string, unknown>;
  if (typeof obj.id !== "string" || obj.id.length === 0) {
    throw new Error("request needs a non-empty string id");
  }
  const op = obj.op;
  if (typeof op !== "string" || !(op in OP_FIELDS)) {
    throw new Error(`unknown op ${JSON.stringify(op)}`);
  }
  const payload = obj.payload;
  if (typeof payload !== "object" || payload === null) {
    throw new Error(`op ${op} needs a payload object`);
  }
  for (const field of OP_FIELDS[op as Op]) {
    if (!(field in (payload as Record<string, unknown>))) {
      throw new Error(`op ${op} payload is missing ${field}`);
    }
  }
  return obj as unknown as BridgeRequest;
}
