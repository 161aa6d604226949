import pytest

from wmpb.corpus import Document, FilterPolicy, Kind, Origin, Source, filter_pairs
from wmpb.lm import MarkovLM
from wmpb.synth import generate_pairs


def make_doc(text: str, id: str = "d0", kind: Kind = Kind.DOC, round: int = 0,
             origin: Origin = Origin.HUMAN, source: Source = Source.SYNTH) -> Document:
    return Document.make(id, source, origin, kind, round, text)


@pytest.fixture(scope="session")
def synth_pairs():
    return generate_pairs(320, seed=101)


@pytest.fixture(scope="session")
def filtered_pairs(synth_pairs):
    return filter_pairs(synth_pairs, FilterPolicy())


@pytest.fixture(scope="session")
def corpus_docs(filtered_pairs):
    return [p.doc for p in filtered_pairs] + [p.pp for p in filtered_pairs]


@pytest.fixture(scope="session")
def model(corpus_docs):
    return MarkovLM(order=2, smoothing=1e-4).fit(corpus_docs)
