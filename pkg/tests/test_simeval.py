import math

import pytest

from wmpb.errors import DimensionError, EmptyInputError, NotFittedError
from wmpb.hashing import SplitMix64
from wmpb.paraphrase import (
    ConservativeConfig,
    DiverseConfig,
    ParaphraserKind,
    ParaphraserSpec,
    recursive_paraphrase,
)
from wmpb.simeval import (
    TfidfEmbedder,
    cosine_similarity,
    fit_embedder,
    round_similarity_report,
)
from wmpb.synth import default_lexicon

from conftest import make_doc


def corpus(*texts):
    return [make_doc(t, id=f"c{i}") for i, t in enumerate(texts)]


# --- fitting -------------------------------------------------------------------


def test_fit_empty_corpus():
    with pytest.raises(EmptyInputError):
        TfidfEmbedder().fit([])


def test_unfitted_rejected():
    with pytest.raises(NotFittedError):
        TfidfEmbedder().transform("a b")


def test_idf_floor_for_ubiquitous_term():
    emb = fit_embedder(corpus("common alpha", "common beta", "common gamma"))
    # df = N: ln((1+N)/(1+N)) + 1 = 1.0
    assert emb.idf("common") == pytest.approx(1.0, abs=1e-12)


def test_idf_hand_computed_three_docs():
    emb = fit_embedder(corpus("a b", "a c", "a b d"))
    n = 3
    assert emb.idf("a") == pytest.approx(math.log((1 + n) / (1 + 3)) + 1, abs=1e-12)
    assert emb.idf("b") == pytest.approx(math.log((1 + n) / (1 + 2)) + 1, abs=1e-12)
    assert emb.idf("c") == pytest.approx(math.log((1 + n) / (1 + 1)) + 1, abs=1e-12)
    # Unseen terms behave like df = 0.
    assert emb.idf("zzz") == pytest.approx(math.log(1 + n) + 1, abs=1e-12)


def test_single_document_corpus_all_idf_equal():
    emb = fit_embedder(corpus("one two three"))
    values = {emb.idf(t) for t in ("one", "two", "three")}
    assert len(values) == 1


def test_transform_counts_and_case():
    emb = fit_embedder(corpus("a a b.", "b c"))
    vec = emb.transform("A a b.")
    assert vec["a"] == pytest.approx(2 * emb.idf("a"))
    assert vec["b"] == pytest.approx(1 * emb.idf("b"))
    assert "." not in vec  # punctuation tokens are not terms
    assert emb.transform("") == {}


# --- cosine ----------------------------------------------------------------------


def test_self_similarity():
    emb = fit_embedder(corpus("x y z", "p q r"))
    assert cosine_similarity("x y z", "x y z", emb) == pytest.approx(1.0, abs=1e-9)


def test_disjoint_vocabularies():
    emb = fit_embedder(corpus("x y", "p q"))
    assert cosine_similarity("x y", "p q", emb) == 0.0


def test_half_overlap_hand_computation():
    # Unit weights: every term in every document gives idf = 1.
    emb = fit_embedder(corpus("a b c", "a b c"))
    assert cosine_similarity("a b", "a c", emb) == pytest.approx(0.5, abs=1e-12)


def test_zero_vector_similarity():
    emb = fit_embedder(corpus("a b"))
    assert cosine_similarity("", "a b", emb) == 0.0
    assert cosine_similarity(".", "a b", emb) == 0.0


def test_symmetry_exact(corpus_docs):
    emb = fit_embedder(corpus_docs[:50])
    rng = SplitMix64(14)
    for _ in range(50):
        a = corpus_docs[rng.below(50)].text
        b = corpus_docs[rng.below(50)].text
        assert cosine_similarity(a, b, emb) == cosine_similarity(b, a, emb)


def test_scale_invariance_under_duplication(corpus_docs):
    emb = fit_embedder(corpus_docs[:50])
    a = corpus_docs[0].text
    b = corpus_docs[1].text
    reference = cosine_similarity(a, b, emb)
    for k in (2, 3, 5):
        duplicated = " ".join([a] * k)
        assert cosine_similarity(duplicated, b, emb) == pytest.approx(reference, abs=1e-9)


def test_range(corpus_docs):
    emb = fit_embedder(corpus_docs[:80])
    rng = SplitMix64(15)
    for _ in range(100):
        a = corpus_docs[rng.below(80)].text
        b = corpus_docs[rng.below(80)].text
        value = cosine_similarity(a, b, emb)
        assert 0.0 <= value <= 1.0 + 1e-12


# --- round report -------------------------------------------------------------------


def _lineages(docs, spec, rounds=5, seed0=0):
    return [recursive_paraphrase(d, spec, rounds, seed0 + i) for i, d in enumerate(docs)]


def test_identity_paraphraser_reports_ones(corpus_docs):
    spec = ParaphraserSpec("id", ParaphraserKind.CONSERVATIVE, ConservativeConfig())
    lineages = _lineages(corpus_docs[:10], spec)
    emb = fit_embedder(corpus_docs[:10])
    report = round_similarity_report(lineages, emb)
    assert [r.round for r in report] == [1, 2, 3, 4, 5]
    for row in report:
        assert row.mean == pytest.approx(1.0, abs=1e-9)
        assert row.n == 10


def test_singleton_lineage_zero_stddev(corpus_docs):
    spec = ParaphraserSpec(
        "div",
        ParaphraserKind.DIVERSE,
        config=DiverseConfig(p_sub=0.3, p_del=0.0, reorder=False, lexicon=default_lexicon()),
    )
    lineages = _lineages(corpus_docs[:1], spec)
    report = round_similarity_report(lineages, fit_embedder(corpus_docs[:10]))
    assert all(row.stddev == 0.0 for row in report)


def test_diverse_rounds_decay(corpus_docs):
    spec = ParaphraserSpec(
        "div",
        ParaphraserKind.DIVERSE,
        config=DiverseConfig(p_sub=0.3, p_del=0.0, reorder=False, lexicon=default_lexicon()),
    )
    docs = corpus_docs[:100]
    lineages = _lineages(docs, spec, seed0=400)
    report = round_similarity_report(lineages, fit_embedder(docs))
    assert report[4].mean < report[0].mean
    assert report[0].mean > 0.6


def test_similarity_always_against_base(corpus_docs):
    # A paraphraser that returns the base text on even rounds: if the
    # report compared against the previous round, round 2 would not be 1.0.
    base_text = corpus_docs[0].text

    def flip_flop(text, round_index, seed):
        return base_text if round_index % 2 == 0 else "totally unrelated words here"

    spec = ParaphraserSpec("flip", ParaphraserKind.EXTERNAL, flip_flop)
    lineages = _lineages(corpus_docs[:1], spec, rounds=4)
    report = round_similarity_report(lineages, fit_embedder(corpus_docs[:10]))
    assert report[1].mean == pytest.approx(1.0, abs=1e-9)
    assert report[0].mean < 0.5


def test_inconsistent_round_counts_rejected(corpus_docs):
    spec = ParaphraserSpec("id", ParaphraserKind.CONSERVATIVE, ConservativeConfig())
    lineages = _lineages(corpus_docs[:2], spec, rounds=3)
    lineages += _lineages(corpus_docs[2:3], spec, rounds=4)
    with pytest.raises(DimensionError):
        round_similarity_report(lineages, fit_embedder(corpus_docs[:10]))


def test_empty_lineages_rejected(corpus_docs):
    with pytest.raises(EmptyInputError):
        round_similarity_report([], fit_embedder(corpus_docs[:10]))
