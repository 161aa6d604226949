"""Client for sidecar model processes speaking the wmpb/1 line protocol.

The sidecar reads one JSON object per line on stdin and answers one per
line on stdout, in request order, after an initial handshake line of the
form ``{"protocol": "wmpb/1", "ops": [...]}``.  One request is in flight
per process; parallelism is achieved by pooling processes, not by
pipelining within one.

The workbench deals with sidecars in raw text only and re-tokenizes
whatever comes back with its own tokenizer.
"""

from __future__ import annotations

import json
import subprocess
from typing import Sequence

from .errors import BridgeConnectivityError, BridgeOpError, BridgeProtocolError

PROTOCOL = "wmpb/1"


class BridgeClient:
    """Owns one sidecar process and its request/response bookkeeping."""

    def __init__(self, command: Sequence[str]):
        self.command = list(command)
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BridgeConnectivityError(f"could not start sidecar {self.command}: {exc}") from exc
        self._next_id = 0
        handshake = self._read_line()
        if handshake.get("protocol") != PROTOCOL:
            self.close()
            raise BridgeProtocolError(f"unsupported handshake: {handshake!r}")
        self.ops: list[str] = list(handshake.get("ops", []))
        self.handshake = handshake

    def _read_line(self) -> dict:
        line = self._proc.stdout.readline()
        if line == "":
            raise BridgeConnectivityError(f"sidecar {self.command} closed its output stream")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BridgeProtocolError(f"sidecar sent invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise BridgeProtocolError("sidecar sent a non-object line")
        return obj

    def request(self, op: str, payload: dict) -> dict:
        """Send one request and block for its response."""
        self._next_id += 1
        req_id = f"req-{self._next_id:06d}"
        message = json.dumps({"op": op, "id": req_id, "payload": payload})
        try:
            self._proc.stdin.write(message + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise BridgeConnectivityError(f"sidecar {self.command} hung up: {exc}") from exc
        response = self._read_line()
        if response.get("id") != req_id:
            raise BridgeProtocolError(
                f"response id {response.get('id')!r} does not match request {req_id!r}"
            )
        if not response.get("ok"):
            raise BridgeOpError(str(response.get("error", "sidecar reported failure")))
        result = response.get("result")
        if result is None:
            raise BridgeProtocolError("ok response carried no result")
        return result

    def generate(self, prompt_text: str, max_tokens: int, seed: int, watermark: dict | None = None) -> str:
        payload = {"prompt_text": prompt_text, "max_tokens": max_tokens, "seed": seed}
        if watermark is not None:
            payload["watermark"] = watermark
        return self.request("generate", payload)["text"]

    def paraphrase(self, text: str, round: int, seed: int) -> str:
        return self.request("paraphrase", {"text": text, "round": round, "seed": seed})["text"]

    def embed(self, text: str) -> list[float]:
        return self.request("embed", {"text": text})["vector"]

    def score(self, text: str) -> float:
        return float(self.request("score", {"text": text})["score"])

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self) -> "BridgeClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def external_paraphraser(client: BridgeClient):
    """Adapt a sidecar to the recursive-paraphrase driver's callable shape."""

    def rewrite(text: str, round_index: int, seed: int) -> str:
        return client.paraphrase(text, round_index, seed)

    return rewrite


def external_scorer(client: BridgeClient):
    """Adapt a sidecar to the detector callable shape (higher = LLM)."""

    def score(text: str) -> float:
        return client.score(text)

    return score
