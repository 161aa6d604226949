"""Detectors: uniform real-valued LLM-likeness scoring over documents.

Score orientation is standardized as higher = more LLM-like.  Two native
detectors ship here: the green-token z-score detector and a zero-shot
likelihood detector that scores typicality under the generation model.
External classifiers attach through the bridge client and must conform to
the same orientation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .corpus import Document
from .errors import TooShortError
from .hashing import SplitMix64, hash_string
from .lm import MarkovLM
from .metrics import DetectionRecord, confusion
from .tokenizer import Vocabulary, tokenize
from .watermark import WatermarkParams, score_text

WATERMARK_Z_THRESHOLD = 4.0
CALIBRATION_FRACTION = 0.1


class DetectorKind(str, Enum):
    WATERMARK = "WATERMARK"
    LIKELIHOOD = "LIKELIHOOD"
    EXTERNAL = "EXTERNAL"


@dataclass
class DetectorSpec:
    name: str
    kind: DetectorKind
    params: object

    def scorer(self) -> Callable[[str], float]:
        if self.kind is DetectorKind.WATERMARK:
            params, vocab = self.params
            return lambda text: score_watermark(text, params, vocab)
        if self.kind is DetectorKind.LIKELIHOOD:
            return lambda text: score_likelihood(text, self.params)
        return self.params  # EXTERNAL: params is already a text -> score callable


def encode_for_scoring(text: str, vocab: Vocabulary) -> list[int]:
    """Map token surfaces to indices; out-of-vocabulary surfaces hash in.

    The fallback keeps scoring total: an unknown surface maps to
    fnv1a(surface) % vocab_size, which is deterministic, portable, and
    uniform enough that unknown tokens stay at the null green rate.
    """
    size = len(vocab)
    return [vocab.index.get(tok, hash_string(tok) % size) for tok in tokenize(text)]


def score_watermark(text: str, params: WatermarkParams, vocab: Vocabulary) -> float:
    """Green-token z-score of the text; raises TooShortError below 2 tokens."""
    tokens = encode_for_scoring(text, vocab)
    return score_text(tokens, params, len(vocab)).z


def score_likelihood(text: str, model: MarkovLM) -> float:
    """Mean per-token log-probability under the generation model."""
    surfaces = tokenize(text)
    if len(surfaces) < 2:
        raise TooShortError(f"need at least 2 tokens to score, got {len(surfaces)}")
    index = model.vocab.index
    ids = [index.get(s) for s in surfaces]
    total = 0.0
    for t, tok in enumerate(ids):
        context = [i for i in ids[max(0, t - model.order) : t] if i is not None]
        total += model.logprob(context, tok)
    return total / len(ids)


def run_detector(spec: DetectorSpec, docs: list[Document]) -> list[DetectionRecord]:
    """Score every document; failures become flagged records, never aborts.

    A document that cannot be scored gets score -inf (confidently human)
    plus the error text, matching the convention that higher means LLM.
    """
    scorer = spec.scorer()
    records = []
    for doc in docs:
        try:
            record = DetectionRecord(doc.id, scorer(doc.text), doc.origin, spec.name)
        except TooShortError as exc:
            record = DetectionRecord(doc.id, float("-inf"), doc.origin, spec.name, error=str(exc))
        records.append(record)
    return records


def calibrate_threshold(records: list[DetectionRecord], seed: int, fraction: float = CALIBRATION_FRACTION) -> tuple[float, list[DetectionRecord]]:
    """Pick the balanced-accuracy-maximizing threshold on a held-out split.

    The split is stratified per class so the remaining evaluation records
    stay balanced; returns (threshold, evaluation records).  Candidate
    thresholds are midpoint-free: each distinct score, scanned from high
    to low, plus a +inf guard; the first maximizer wins, which keeps the
    choice stable under monotone score transforms.
    """
    rng = SplitMix64(seed)
    calib: list[DetectionRecord] = []
    rest: list[DetectionRecord] = []
    by_class: dict[object, list[DetectionRecord]] = {}
    for r in records:
        by_class.setdefault(r.truth, []).append(r)
    for _, group in sorted(by_class.items(), key=lambda kv: kv[0].value):
        picks = set(rng.sample_indices(len(group), max(1, int(len(group) * fraction))))
        for i, r in enumerate(group):
            (calib if i in picks else rest).append(r)
    best_t = float("inf")
    best_score = -1.0
    for t in sorted({r.score for r in calib}, reverse=True) + [float("inf")]:
        c = confusion(calib, t)
        tpr = c.tp / (c.tp + c.fn) if (c.tp + c.fn) else 0.0
        tnr = c.tn / (c.tn + c.fp) if (c.tn + c.fp) else 0.0
        balanced = (tpr + tnr) / 2.0
        if balanced > best_score:
            best_score = balanced
            best_t = t
    return best_t, rest
