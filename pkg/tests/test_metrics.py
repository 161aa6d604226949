

import pytest

from wmpb.corpus import Origin
from wmpb.errors import EmptyInputError, SingleClassError
from wmpb.hashing import SplitMix64
from wmpb.metrics import (
    DetectionRecord,
    accuracy,
    auroc,
    confusion,
    roc_curve,
    summarize,
    tpr_at_fpr,
)


def rec(score, llm, i=0):
    return DetectionRecord(f"d{i}", score, Origin.LLM if llm else Origin.HUMAN, "t")


def recs(human_scores, llm_scores):
    out = [rec(s, False, i) for i, s in enumerate(human_scores)]
    out += [rec(s, True, 1000 + i) for i, s in enumerate(llm_scores)]
    return out


# --- independent oracles ------------------------------------------------------


def pairwise_auroc(records):
    """P(llm > human) + 0.5 P(tie) over all cross-class pairs."""
    pos = [r.score for r in records if r.truth is Origin.LLM]
    neg = [r.score for r in records if r.truth is Origin.HUMAN]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def sweep_tpr_at_fpr(records, budget):
    """Exhaustive threshold sweep; no ROC machinery involved."""
    pos = [r.score for r in records if r.truth is Origin.LLM]
    neg = [r.score for r in records if r.truth is Origin.HUMAN]
    best = 0.0
    candidates = {float("inf"), float("-inf")} | {r.score for r in records}
    for t in candidates:
        fpr = sum(1 for s in neg if s > t) / len(neg)
        tpr = sum(1 for s in pos if s > t) / len(pos)
        if fpr <= budget:
            best = max(best, tpr)
    return best


def enumerate_confusion(records, threshold):
    tp = sum(1 for r in records if r.truth is Origin.LLM and r.score > threshold)
    fn = sum(1 for r in records if r.truth is Origin.LLM and r.score <= threshold)
    fp = sum(1 for r in records if r.truth is Origin.HUMAN and r.score > threshold)
    tn = sum(1 for r in records if r.truth is Origin.HUMAN and r.score <= threshold)
    return tp, fp, tn, fn


FOUR = recs(human_scores=[0.8, 0.1], llm_scores=[0.9, 0.2])


def _random_records(rng, n_max=50):
    n_pos = 1 + rng.below(n_max)
    n_neg = 1 + rng.below(n_max)
    # Coarse grid injects plenty of ties, within and across classes.
    pos = [rng.below(12) / 10 + rng.below(2) * 0.05 for _ in range(n_pos)]
    neg = [rng.below(12) / 10 for _ in range(n_neg)]
    return recs(neg, pos)


# --- confusion ------------------------------------------------------------------


def test_confusion_direct_enumeration():
    c = confusion(FOUR, 0.5)
    assert (c.tp, c.fp, c.tn, c.fn) == (1, 1, 1, 1)
    assert enumerate_confusion(FOUR, 0.5) == (1, 1, 1, 1)


def test_confusion_perfect_recall():
    c = confusion(recs([0.1], [0.7, 0.9]), 0.5)
    assert c.fn == 0 and c.tp == 2


def test_confusion_infinite_threshold():
    c = confusion(FOUR, float("inf"))
    assert c.tp == 0 and c.fp == 0 and c.tn + c.fn == 4


def test_confusion_counts_partition_randomly():
    rng = SplitMix64(1)
    for _ in range(50):
        records = _random_records(rng)
        t = rng.below(12) / 10
        c = confusion(records, t)
        assert (c.tp, c.fp, c.tn, c.fn) == enumerate_confusion(records, t)
        assert c.tp + c.fp + c.tn + c.fn == len(records)


def test_confusion_empty():
    with pytest.raises(EmptyInputError):
        confusion([], 0.5)


# --- roc curve --------------------------------------------------------------------


def test_roc_perfect_separation_hits_corner():
    points = roc_curve(recs([0.1, 0.2], [0.8, 0.9]))
    assert any(p.fpr == 0.0 and p.tpr == 1.0 for p in points)
    assert points[0].tpr == 0.0 and points[0].fpr == 0.0
    assert points[-1].tpr == 1.0 and points[-1].fpr == 1.0


def test_roc_all_tied_is_two_sentinels():
    points = roc_curve(recs([0.5, 0.5], [0.5, 0.5]))
    assert [(p.tpr, p.fpr) for p in points] == [(0.0, 0.0), (1.0, 1.0)]
    assert points[0].threshold == float("inf")
    assert points[-1].threshold == float("-inf")


def test_roc_matches_brute_force_enumeration():
    # Oracle: evaluate every candidate threshold directly, collapse dups.
    def oracle(records):
        pos = [r.score for r in records if r.truth is Origin.LLM]
        neg = [r.score for r in records if r.truth is Origin.HUMAN]
        pts = [(0.0, 0.0)]
        for t in [float("inf")] + sorted(set(pos + neg), reverse=True) + [float("-inf")]:
            tpr = sum(1 for s in pos if s > t) / len(pos)
            fpr = sum(1 for s in neg if s > t) / len(neg)
            if (tpr, fpr) != pts[-1]:
                pts.append((tpr, fpr))
        return pts

    rng = SplitMix64(2)
    for _ in range(100):
        records = _random_records(rng)
        assert [(p.tpr, p.fpr) for p in roc_curve(records)] == oracle(records)


def test_roc_monotone(synth_pairs):
    rng = SplitMix64(3)
    for _ in range(30):
        points = roc_curve(_random_records(rng))
        for a, b in zip(points, points[1:]):
            assert b.tpr >= a.tpr and b.fpr >= a.fpr


def test_roc_single_class_error():
    with pytest.raises(SingleClassError):
        roc_curve(recs([], [0.5, 0.7]))
    with pytest.raises(SingleClassError):
        auroc(recs([0.5], []))


# --- auroc ------------------------------------------------------------------------


def test_auroc_known_answers():
    assert auroc(recs([0.1, 0.2], [0.8, 0.9])) == 1.0
    assert auroc(recs([0.5, 0.5], [0.5, 0.5])) == 0.5
    # Hand oracle: pairs (0.6>0.4), (0.6<0.8), (0.9>0.4), (0.9>0.8) = 3/4.
    assert auroc(recs([0.4, 0.8], [0.6, 0.9])) == pytest.approx(0.75, abs=1e-12)


def test_auroc_equals_pairwise_oracle():
    rng = SplitMix64(4)
    for _ in range(200):
        records = _random_records(rng)
        assert auroc(records) == pytest.approx(pairwise_auroc(records), abs=1e-9)


def test_auroc_complement_symmetry():
    rng = SplitMix64(5)
    for _ in range(50):
        records = _random_records(rng)
        flipped = [
            DetectionRecord(r.doc_id, -r.score,
                            Origin.LLM if r.truth is Origin.HUMAN else Origin.HUMAN, r.detector)
            for r in records
        ]
        assert auroc(flipped) == auroc(records)


def test_auroc_monotone_transform_invariance():
    rng = SplitMix64(6)
    for _ in range(50):
        records = _random_records(rng)
        transformed = [
            DetectionRecord(r.doc_id, 2.0 * r.score + 1.0, r.truth, r.detector) for r in records
        ]
        assert auroc(transformed) == auroc(records)
        assert [(p.tpr, p.fpr) for p in roc_curve(transformed)] == [
            (p.tpr, p.fpr) for p in roc_curve(records)
        ]
        assert tpr_at_fpr(transformed, 0.1) == tpr_at_fpr(records, 0.1)


# --- tpr at fpr budget ---------------------------------------------------------------


def test_tpr_at_fpr_known_answers():
    perfect = recs([0.1, 0.2], [0.8, 0.9])
    for budget in (0.0, 0.01, 0.5, 1.0):
        assert tpr_at_fpr(perfect, budget) == 1.0
    inverted = recs([0.8, 0.9], [0.1, 0.2])
    assert tpr_at_fpr(inverted, 0.01) == 0.0


def test_tpr_at_fpr_three_hundred_negatives():
    # With 300 negatives, a 1% budget admits at most 3 false positives.
    rng = SplitMix64(7)
    neg = [rng.uniform() for _ in range(300)]
    pos = [rng.uniform() + 0.3 for _ in range(300)]
    records = recs(neg, pos)
    value = tpr_at_fpr(records, 0.01)
    assert value == sweep_tpr_at_fpr(records, 0.01)
    # Direct check that the winning threshold keeps fpr within budget.
    point = max((p for p in roc_curve(records) if p.fpr <= 0.01), key=lambda p: p.tpr)
    assert sum(1 for s in neg if s > point.threshold) <= 3


def test_tpr_at_fpr_equals_sweep_oracle():
    rng = SplitMix64(8)
    for _ in range(200):
        records = _random_records(rng)
        budget = rng.below(101) / 100
        assert tpr_at_fpr(records, budget) == sweep_tpr_at_fpr(records, budget)


def test_tpr_at_fpr_full_budget_and_monotonicity():
    rng = SplitMix64(9)
    for _ in range(30):
        records = _random_records(rng)
        assert tpr_at_fpr(records, 1.0) == 1.0
        budgets = sorted(rng.below(101) / 100 for _ in range(5))
        values = [tpr_at_fpr(records, b) for b in budgets]
        assert values == sorted(values)


def test_tpr_at_fpr_budget_validation():
    with pytest.raises(ValueError):
        tpr_at_fpr(FOUR, 1.5)


# --- accuracy ---------------------------------------------------------------------------


def test_accuracy_known_answers():
    assert accuracy(recs([0.1, 0.2], [0.8, 0.9]), 0.5) == 1.0
    # Constant scores on a balanced set: everything predicted one class.
    assert accuracy(recs([0.5, 0.5], [0.5, 0.5]), 0.7) == 0.5
    assert accuracy(FOUR, 0.5) == 0.5


def test_summarize_bundles_fields():
    s = summarize(recs([0.1, 0.2], [0.8, 0.9]), threshold=0.5)
    assert s.auroc == 1.0 and s.tpr_at_1pct_fpr == 1.0 and s.accuracy == 1.0
    assert s.n_pos == 2 and s.n_neg == 2
