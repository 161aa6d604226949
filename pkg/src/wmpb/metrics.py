"""Confusion counts, ROC construction, AUROC, TPR@FPR, and accuracy.

All of it is exact integer counting followed by exact rational-ish float
arithmetic; no interpolation anywhere.  Ties are grouped: every distinct
score is one threshold step, which makes the trapezoidal AUROC equal the
pairwise P(llm > human) + 0.5 * P(tie) formulation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Origin
from .errors import EmptyInputError, SingleClassError


@dataclass(frozen=True)
class DetectionRecord:
    """One scored document: the atom of every evaluation."""

    doc_id: str
    score: float
    truth: Origin
    detector: str
    error: str | None = None

    def to_json(self) -> dict:
        row = {
            "doc_id": self.doc_id,
            "detector": self.detector,
            "score": self.score,
            "truth": self.truth.value,
        }
        if self.error is not None:
            row["error"] = self.error
        return row


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    tpr: float
    fpr: float


@dataclass(frozen=True)
class MetricSummary:
    auroc: float
    tpr_at_1pct_fpr: float
    accuracy: float
    n_pos: int
    n_neg: int


def _split_scores(records: list[DetectionRecord]) -> tuple[list[float], list[float]]:
    pos = [r.score for r in records if r.truth is Origin.LLM]
    neg = [r.score for r in records if r.truth is Origin.HUMAN]
    return pos, neg


def _require_both_classes(records: list[DetectionRecord]) -> tuple[list[float], list[float]]:
    pos, neg = _split_scores(records)
    if not pos or not neg:
        raise SingleClassError("need at least one record of each truth class")
    return pos, neg


def confusion(records: list[DetectionRecord], threshold: float) -> ConfusionCounts:
    """Predicted LLM iff score is strictly greater than the threshold."""
    if not records:
        raise EmptyInputError("confusion needs at least one record")
    tp = fp = tn = fn = 0
    for r in records:
        predicted_llm = r.score > threshold
        if r.truth is Origin.LLM:
            tp, fn = tp + predicted_llm, fn + (not predicted_llm)
        else:
            fp, tn = fp + predicted_llm, tn + (not predicted_llm)
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _count_steps(records: list[DetectionRecord]) -> tuple[list[tuple[float, int, int]], int, int]:
    """Integer (threshold, tp, fp) per threshold step, thresholds descending.

    Prediction is strict `score > threshold`, so the counts at a threshold
    equal to some score exclude that tie group; the -inf sentinel picks up
    everything.
    """
    pos, neg = _require_both_classes(records)
    pos_at: dict[float, int] = {}
    neg_at: dict[float, int] = {}
    for s in pos:
        pos_at[s] = pos_at.get(s, 0) + 1
    for s in neg:
        neg_at[s] = neg_at.get(s, 0) + 1
    steps = [(float("inf"), 0, 0)]
    tp = fp = 0
    for s in sorted(set(pos_at) | set(neg_at), reverse=True):
        steps.append((s, tp, fp))
        tp += pos_at.get(s, 0)
        fp += neg_at.get(s, 0)
    steps.append((float("-inf"), tp, fp))
    return steps, len(pos), len(neg)


def roc_curve(records: list[DetectionRecord]) -> list[RocPoint]:
    """Sweep thresholds over the distinct scores, descending, plus sentinels.

    Consecutive points with identical (fpr, tpr) collapse into the first,
    so a fully tied score set yields exactly the (0,0) and (1,1) corners.
    """
    steps, n_pos, n_neg = _count_steps(records)
    points: list[RocPoint] = []
    last = None
    for t, tp, fp in steps:
        if (tp, fp) != last:
            points.append(RocPoint(threshold=t, tpr=tp / n_pos, fpr=fp / n_neg))
            last = (tp, fp)
    return points


def auroc(records: list[DetectionRecord]) -> float:
    """Trapezoidal area under the ROC curve.

    Accumulated as an exact integer (the counts are integers), divided
    once, so tie handling, complement symmetry, and the pairwise
    probability formulation all agree to the last bit.
    """
    steps, n_pos, n_neg = _count_steps(records)
    twice_area = 0
    for (_, tp_a, fp_a), (_, tp_b, fp_b) in zip(steps, steps[1:]):
        twice_area += (fp_b - fp_a) * (tp_a + tp_b)
    return twice_area / (2 * n_pos * n_neg)


def tpr_at_fpr(records: list[DetectionRecord], fpr_budget: float = 0.01) -> float:
    """Best TPR of any threshold whose empirical FPR fits the budget."""
    if not (0.0 <= fpr_budget <= 1.0):
        raise ValueError("fpr_budget must be in [0, 1]")
    return max(p.tpr for p in roc_curve(records) if p.fpr <= fpr_budget)


def accuracy(records: list[DetectionRecord], threshold: float) -> float:
    c = confusion(records, threshold)
    return (c.tp + c.tn) / (c.tp + c.tn + c.fp + c.fn)


def summarize(records: list[DetectionRecord], threshold: float, fpr_budget: float = 0.01) -> MetricSummary:
    pos, neg = _require_both_classes(records)
    return MetricSummary(
        auroc=auroc(records),
        tpr_at_1pct_fpr=tpr_at_fpr(records, fpr_budget),
        accuracy=accuracy(records, threshold),
        n_pos=len(pos),
        n_neg=len(neg),
    )
