"""Semantic-similarity scoring between originals and their paraphrase rounds.

The embedder is corpus-fit TF-IDF with cosine similarity:

    idf(t) = ln((1 + N) / (1 + df(t))) + 1        tf = raw count

so a term present in every document bottoms out at weight 1.0.  It will
not reproduce any neural embedder's absolute scores, but it preserves the
orderings the workbench asserts: conservative rewrites stay near 1.0,
diverse rewrites decay with every round.  Punctuation tokens are dropped
and terms are lowercased before weighting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Document
from .errors import DimensionError, EmptyInputError, NotFittedError
from .paraphrase import ParaphraseLineage
from .tokenizer import TERMINAL_PUNCT, tokenize


def _terms(text: str) -> list[str]:
    return [t.lower() for t in tokenize(text) if not all(c in TERMINAL_PUNCT for c in t)]


class TfidfEmbedder:
    """Sparse TF-IDF text embedder with a scikit-style fit/transform surface."""

    def __init__(self):
        self._idf: dict[str, float] | None = None
        self._default_idf: float = 0.0

    def get_params(self) -> dict:
        return {}

    def fit(self, corpus: list[Document]) -> "TfidfEmbedder":
        if not corpus:
            raise EmptyInputError("cannot fit an embedder on an empty corpus")
        n = len(corpus)
        df: dict[str, int] = {}
        for doc in corpus:
            for term in set(_terms(doc.text)):
                df[term] = df.get(term, 0) + 1
        self._idf = {t: math.log((1 + n) / (1 + d)) + 1.0 for t, d in df.items()}
        # Unseen terms act like df = 0.
        self._default_idf = math.log(1 + n) + 1.0
        return self

    def _check_fitted(self):
        if self._idf is None:
            raise NotFittedError("embedder is not fitted; call fit() first")

    def idf(self, term: str) -> float:
        self._check_fitted()
        return self._idf.get(term, self._default_idf)

    def transform(self, text: str) -> dict[str, float]:
        """Sparse term -> tf*idf weight map; empty text gives the zero vector."""
        self._check_fitted()
        tf: dict[str, int] = {}
        for term in _terms(text):
            tf[term] = tf.get(term, 0) + 1
        return {t: c * self.idf(t) for t, c in tf.items()}


def cosine_of_vectors(a: dict[str, float], b: dict[str, float]) -> float:
    if not a or not b:
        return 0.0
    # Sorted term walk keeps summation order identical both ways, so
    # cosine(a, b) == cosine(b, a) exactly.
    dot = sum(a[t] * b[t] for t in sorted(a.keys() & b.keys()))
    na = math.sqrt(sum(w * w for _, w in sorted(a.items())))
    nb = math.sqrt(sum(w * w for _, w in sorted(b.items())))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def cosine_similarity(a: str, b: str, embedder: TfidfEmbedder) -> float:
    return cosine_of_vectors(embedder.transform(a), embedder.transform(b))


@dataclass(frozen=True)
class RoundSimilarity:
    round: int
    mean: float
    stddev: float
    n: int


def round_similarity_report(lineages: list[ParaphraseLineage], embedder: TfidfEmbedder) -> list[RoundSimilarity]:
    """Mean/stddev of cosine(base, round_i) per round, across lineages.

    Similarity is always against the round-0 base, never the previous
    round.  Standard deviation is the population form, so a single lineage
    reports 0.
    """
    if not lineages:
        raise EmptyInputError("no lineages to report on")
    n_rounds = len(lineages[0].rounds)
    if any(len(lin.rounds) != n_rounds for lin in lineages):
        raise DimensionError("all lineages must have the same round count")
    report = []
    for i in range(1, n_rounds + 1):
        values = [
            cosine_similarity(lin.base.text, lin.at_round(i).text, embedder)
            for lin in lineages
        ]
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        report.append(RoundSimilarity(round=i, mean=mean, stddev=math.sqrt(var), n=len(values)))
    return report


def fit_embedder(corpus: list[Document]) -> TfidfEmbedder:
    return TfidfEmbedder().fit(corpus)
