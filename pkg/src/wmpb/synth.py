"""Bundled synthetic paraphrase corpus.

Real paraphrase datasets cannot be redistributed here, so the workbench
ships a generator that fabricates aligned document/paraphrase pairs over a
fixed nonce-word vocabulary.  The inventory is 130 synonym groups of 4
words each (520 content words), plus a handful of function words and
numeric tokens.  Every content word's group siblings double as its
synonyms, which gives the diverse rewriter a lexicon that covers the whole
vocabulary.

Everything is a pure function of the seed; the word inventory itself is
frozen by an internal constant so the bundled lexicon never drifts.
"""

from __future__ import annotations

from functools import lru_cache

from .corpus import Document, Kind, Origin, ParaphrasePair, Source
from .hashing import SplitMix64, hash_pair

_INVENTORY_SEED = 0x5EED_FACE
_N_GROUPS = 130
_GROUP_SIZE = 4

_CONSONANTS = list("bcdfghjklmnprstvz")
_VOWELS = list("aeiou")
_CODAS = ["", "n", "r", "s", "t", "l"]

FUNCTION_WORDS = ["the", "a", "of", "and", "to", "in", "on", "with", "for", "at"]
UNITS = ["percent", "points", "units"]


def _nonce_word(rng: SplitMix64) -> str:
    syllables = 2 + rng.below(2)
    w = "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(syllables))
    return w + rng.choice(_CODAS)


@lru_cache(maxsize=1)
def _inventory() -> tuple[list[list[str]], list[list[str]], list[list[str]]]:
    """Frozen synonym groups, split by grammatical role (nouns, verbs, adjectives)."""
    rng = SplitMix64(_INVENTORY_SEED)
    words: list[str] = []
    seen = set(FUNCTION_WORDS + UNITS)
    while len(words) < _N_GROUPS * _GROUP_SIZE:
        w = _nonce_word(rng)
        if w not in seen:
            seen.add(w)
            words.append(w)
    groups = [words[i : i + _GROUP_SIZE] for i in range(0, len(words), _GROUP_SIZE)]
    nouns = [g for i, g in enumerate(groups) if i % 3 == 0]
    verbs = [g for i, g in enumerate(groups) if i % 3 == 1]
    adjs = [g for i, g in enumerate(groups) if i % 3 == 2]
    return nouns, verbs, adjs


def default_lexicon() -> dict[str, list[str]]:
    """Map every content word to its group siblings."""
    lex: dict[str, list[str]] = {}
    for role in _inventory():
        for group in role:
            for w in group:
                lex[w] = [s for s in group if s != w]
    return lex


def default_rewrite_rules() -> list[tuple[list[str], list[str]]]:
    """Near-identity rewrite table: sparse in-vocabulary synonym swaps.

    One rule per sixth synonym group, each mapping the group's first word
    to its second.  Rules fire rarely (any single content word is in a
    small fraction of documents), so most rewrites return the input
    unchanged.  No replacement is ever a left-hand side, so one pass is a
    fixpoint.
    """
    rules = []
    for role in _inventory():
        for group in role[::6]:
            rules.append(([group[0]], [group[1]]))
    return rules


def _pick(rng: SplitMix64, groups: list[list[str]]) -> str:
    return rng.choice(rng.choice(groups))


def _number(rng: SplitMix64) -> str:
    if rng.below(2):
        return f"{rng.below(200)}.{rng.below(10)}"
    return str(rng.below(1000))


def _sentence(rng: SplitMix64) -> list[str]:
    nouns, verbs, adjs = _inventory()
    n = lambda: _pick(rng, nouns)
    v = lambda: _pick(rng, verbs)
    adj = lambda: _pick(rng, adjs)
    num = lambda: _number(rng)
    unit = lambda: rng.choice(UNITS)
    templates = [
        lambda: ["the", adj(), n(), v(), "the", adj(), n(), "."],
        lambda: [adj(), n(), v(), n(), "and", adj(), n(), v(), "."],
        lambda: ["the", n(), v(), num(), unit(), "to", num(), "."],
        lambda: [n(), "of", "the", adj(), n(), v(), "the", n(), ",", "and", n(), v(), adj(), n(), "."],
        lambda: ["a", adj(), n(), v(), "with", adj(), n(), "."],
        lambda: ["the", adj(), n(), "of", n(), v(), adj(), n(), "."],
        lambda: [n(), v(), "the", adj(), n(), "at", num(), unit(), "."],
        lambda: [adj(), n(), "and", adj(), n(), v(), "in", n(), "."],
    ]
    return rng.choice(templates)()


def _join(tokens: list[str]) -> str:
    parts: list[str] = []
    for tok in tokens:
        if parts and tok in (".", ","):
            parts[-1] += tok
        else:
            parts.append(tok)
    return " ".join(parts)


def _document(rng: SplitMix64, n_sentences: int) -> str:
    toks: list[str] = []
    for _ in range(n_sentences):
        toks.extend(_sentence(rng))
    return _join(toks)


def _paraphrase(rng: SplitMix64, text: str, lexicon: dict[str, list[str]]) -> str:
    """Human-style paraphrase: synonym swaps plus light deletion."""
    out: list[str] = []
    for tok in text.split():
        bare = tok.rstrip(".,")
        tail = tok[len(bare) :]
        u = rng.uniform()
        if u < 0.05 and tail == "":
            continue
        if u < 0.40 and bare in lexicon:
            bare = rng.choice(lexicon[bare])
        out.append(bare + tail)
    return " ".join(out) if out else text


def _summary(rng: SplitMix64) -> str:
    return _join(_sentence(rng))


def generate_pair_records(n_pairs: int = 320, seed: int = 0, long_form: bool = False) -> list[dict]:
    """Raw pair records in the input-file schema: id, text_a, text_b, label.

    Includes non-paraphrase rows, under-length rows, and one oversize row
    so the filtering stage has real work to do.
    """
    lexicon = default_lexicon()
    records = []
    tag = "synthlong" if long_form else "synth"
    for i in range(n_pairs):
        rng = SplitMix64(hash_pair(seed, i))
        label = 1
        if i % 16 == 7:
            # Unrelated pair.
            text_a = _document(rng, 5 + rng.below(4) if long_form else 2 + rng.below(3))
            text_b = _document(rng, 2)
            label = 0
        elif i % 16 == 11:
            # Under the minimum-length filter.
            short = _sentence(rng)[: 4 + rng.below(4)]
            text_a = _join(short)
            text_b = _paraphrase(rng, text_a, lexicon)
        elif i == 13:
            # Over the 512-token ceiling.
            text_a = _document(rng, 60)
            text_b = _paraphrase(rng, text_a, lexicon)
        else:
            n_sent = 5 + rng.below(4) if long_form else 2 + rng.below(3)
            text_a = _document(rng, n_sent)
            text_b = _summary(rng) if long_form else _paraphrase(rng, text_a, lexicon)
        records.append({"id": f"{tag}-{i:05d}", "text_a": text_a, "text_b": text_b, "label": label})
    return records


def generate_pairs(n_pairs: int = 320, seed: int = 0, long_form: bool = False) -> list[ParaphrasePair]:
    pairs = []
    for rec in generate_pair_records(n_pairs, seed, long_form):
        doc = Document.make(f"{rec['id']}:doc", Source.SYNTH, Origin.HUMAN, Kind.DOC, 0, rec["text_a"])
        pp = Document.make(f"{rec['id']}:pp", Source.SYNTH, Origin.HUMAN, Kind.PP, 1, rec["text_b"])
        pairs.append(ParaphrasePair(doc, pp, rec["label"]))
    return pairs
