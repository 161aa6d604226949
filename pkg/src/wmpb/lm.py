"""Seedable n-gram language model with pluggable logit transforms.

The generator is a word-level Markov chain with add-k smoothing: small
enough to train in milliseconds, but it exposes the one surface the
study actually manipulates, a per-step next-token logit vector that a
watermark can bias before sampling.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import Document
from .errors import EmptyInputError, NotFittedError
from .hashing import SplitMix64
from .tokenizer import Vocabulary, tokenize

LogitTransform = Callable[[np.ndarray, Sequence[int]], np.ndarray]

MODEL_FORMAT = "wmpb-markov/1"


@dataclass
class GenerationRequest:
    """One generation call; max_len caps the total output, prompt included.

    min_len suppresses the end-of-text token until that many tokens exist,
    mirroring the usual decoder knob.
    """

    prompt: list[str]
    max_len: int
    temperature: float = 1.0
    seed: int = 0
    logit_transform: LogitTransform | None = None
    min_len: int = 0

    def __post_init__(self):
        if self.max_len <= 0:
            raise ValueError("max_len must be positive")
        if len(self.prompt) > self.max_len:
            raise ValueError("prompt longer than max_len")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")


def extract_prompt(doc: Document, long_form: bool = False) -> list[str]:
    """First 5 tokens of a document (30 for long-form sources)."""
    n = 30 if long_form else 5
    toks = tokenize(doc.text)
    if len(toks) < n:
        raise ValueError(f"document {doc.id} has {len(toks)} tokens, prompt needs {n}")
    return toks[:n]


class MarkovLM:
    """Add-k smoothed Markov model over the workbench vocabulary.

    Stores transition counts for every context length up to ``order`` and
    backs off to the longest context it has seen (down to the unigram
    table).  Immutable once fitted; generation carries its own RNG.
    """

    def __init__(self, order: int = 2, smoothing: float = 1e-4):
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2, or 3")
        if smoothing <= 0:
            raise ValueError("smoothing must be > 0")
        self.order = order
        self.smoothing = smoothing
        self.vocab: Vocabulary | None = None
        self._counts: dict[tuple[int, ...], Counter] = {}

    def get_params(self) -> dict:
        return {"order": self.order, "smoothing": self.smoothing}

    def fit(self, corpus: list[Document], vocab_docs: list[Document] | None = None) -> "MarkovLM":
        """Count transitions over ``corpus``; ``vocab_docs`` only widen the vocabulary.

        The extra documents let prompts drawn from held-out text encode
        cleanly; their tokens simply sit at the smoothing floor.
        """
        if not corpus:
            raise EmptyInputError("cannot train a model on an empty corpus")
        streams = [tokenize(doc.text) for doc in corpus]
        vocab_streams = streams
        if vocab_docs:
            vocab_streams = streams + [tokenize(doc.text) for doc in vocab_docs]
        self.vocab = Vocabulary.from_token_lists(vocab_streams)
        counts: dict[tuple[int, ...], Counter] = {}
        for stream in streams:
            ids = self.vocab.encode(stream)
            for t, tok in enumerate(ids):
                for k in range(0, self.order + 1):
                    if t - k < 0:
                        break
                    ctx = tuple(ids[t - k : t])
                    counts.setdefault(ctx, Counter())[tok] += 1
        self._counts = counts
        return self

    def _check_fitted(self):
        if self.vocab is None:
            raise NotFittedError("model is not fitted; call fit() first")

    def _context_counts(self, context: Sequence[int]) -> Counter:
        """Longest-suffix backoff; the empty context (unigram) always exists."""
        ctx = tuple(context[-self.order :]) if self.order else ()
        while ctx not in self._counts and ctx:
            ctx = ctx[1:]
        return self._counts[ctx]

    def next_distribution(self, context: Sequence[int]) -> np.ndarray:
        """Log-probability logits over the full vocabulary for one step."""
        self._check_fitted()
        v = len(self.vocab)
        table = self._context_counts(context)
        total = sum(table.values())
        probs = np.full(v, self.smoothing, dtype=np.float64)
        for tok, c in table.items():
            probs[tok] += c
        probs /= total + self.smoothing * v
        return np.log(probs)

    def logprob(self, context: Sequence[int], token: int | None) -> float:
        """Log P(token | context); token=None means out-of-vocabulary.

        Unknown tokens get the smoothing floor, so scoring never fails.
        """
        self._check_fitted()
        v = len(self.vocab)
        table = self._context_counts(context)
        total = sum(table.values())
        count = table.get(token, 0) if token is not None else 0
        return float(np.log((count + self.smoothing) / (total + self.smoothing * v)))

    def generate(self, request: GenerationRequest) -> list[str]:
        """Sample tokens until max_len or end-of-text; returns surfaces.

        Sampling is plain multinomial over the temperature-scaled softmax
        of the (optionally transformed) logits, driven by the request seed.
        """
        self._check_fitted()
        ids = self.vocab.encode(request.prompt)
        rng = SplitMix64(request.seed)
        eot = self.vocab.eot_index
        while len(ids) < request.max_len:
            logits = self.next_distribution(ids)
            if request.logit_transform is not None:
                logits = request.logit_transform(logits, ids)
            scaled = logits / request.temperature
            scaled -= scaled.max()
            probs = np.exp(scaled)
            if len(ids) < request.min_len:
                probs[eot] = 0.0
            cum = np.cumsum(probs)
            u = rng.uniform() * cum[-1]
            tok = int(np.searchsorted(cum, u, side="right"))
            if tok == eot:
                break
            ids.append(tok)
        return self.vocab.decode(ids)

    def save(self, path: str | Path) -> None:
        self._check_fitted()
        payload = {
            "format": MODEL_FORMAT,
            "order": self.order,
            "smoothing": self.smoothing,
            "vocab": self.vocab.to_list(),
            "counts": {
                ",".join(map(str, ctx)): dict(sorted(table.items()))
                for ctx, table in sorted(self._counts.items())
            },
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)

    @classmethod
    def load(cls, path: str | Path) -> "MarkovLM":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != MODEL_FORMAT:
            raise ValueError(f"unsupported model format {payload.get('format')!r}")
        model = cls(order=payload["order"], smoothing=payload["smoothing"])
        model.vocab = Vocabulary(payload["vocab"])
        model._counts = {
            tuple(int(x) for x in key.split(",") if x): Counter({int(t): c for t, c in table.items()})
            for key, table in payload["counts"].items()
        }
        return model


def train_markov(corpus: list[Document], order: int = 2, smoothing: float = 1e-4) -> MarkovLM:
    return MarkovLM(order=order, smoothing=smoothing).fit(corpus)
