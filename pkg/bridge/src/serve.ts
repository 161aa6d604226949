/**
 * Long-running sidecar: handshake line first, then one response line per
 * request line, strictly in order.  A malformed request gets an
 * ok=false response and the process keeps serving; only a broken model
 * load is fatal.
 *
 * Usage: node dist/src/serve.js [model-spec]   (default "mock")
 */

import readline from "node:readline";
import { createModel } from "./models.js";
import {
  PROTOCOL,
  validateRequest,
  type BridgeResponse,
  type GeneratePayload,
  type ParaphrasePayload,
  type EmbedPayload,
  type ScorePayload,
} from "./protocol.js";

function writeLine(payload: unknown): void {
  process.stdout.write(`${JSON.stringify(payload)}\n`);
}

export async function serve(modelSpec: string): Promise<void> {
  const model = createModel(modelSpec);
  writeLine({
    protocol: PROTOCOL,
    ops: model.ops,
    embed_dim: model.embedDim,
    vocab_size: model.vocabSize,
  });

  const lines = readline.createInterface({
    input: process.stdin,
    crlfDelay: Number.POSITIVE_INFINITY,
  });

  for await (const line of lines) {
    if (!line.trim()) {
      continue;
    }
    let id: string | null = null;
    try {
      const parsed: unknown = JSON.parse(line);
      if (parsed && typeof parsed === "object") {
        const rawId = (parsed as Record<string, unknown>).id;
        if (typeof rawId === "string") {
          id = rawId;
        }
      }
      const request = validateRequest(parsed);
      let result: BridgeResponse["result"];
      switch (request.op) {
        case "generate":
          result = { text: model.generate(request.payload as GeneratePayload) };
          break;
        case "paraphrase":
          result = { text: model.paraphrase(request.payload as ParaphrasePayload) };
          break;
        case "embed":
          result = { vector: model.embed((request.payload as EmbedPayload).text) };
          break;
        case "score":
          result = { score: model.score((request.payload as ScorePayload).text) };
          break;
      }
      writeLine({ id, ok: true, result } satisfies BridgeResponse);
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      writeLine({ id, ok: false, error: message } satisfies BridgeResponse);
    }
  }
}

const entry = process.argv[1];
if (entry && (entry.endsWith("serve.js") || entry.endsWith("serve.ts"))) {
  serve(process.argv[2] ?? "mock").catch((error) => {
    process.stderr.write(`${error instanceof Error ? error.message : error}\n`);
    process.exit(1);
  });
}
