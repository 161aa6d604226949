"""Rewriters for the paraphrase attack, plus the recursive driver.

Two built-in regimes, mirroring the two behaviors the study compares:

* diverse -- probabilistic synonym substitution, token deletion, and
  optional clause reordering.  Output drifts further from the original
  on every round.
* conservative -- a single deterministic pass over a rewrite table; a
  fixpoint by the table's construction, so repeated rounds are identical.

External paraphrasers plug in through the bridge client; the driver only
needs a callable from (text, round, seed) to text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .corpus import Document, Kind
from .errors import BridgeError
from .hashing import SplitMix64, hash_pair
from .tokenizer import detokenize, sentences, tokenize

MAX_ROUNDS = 5


class ParaphraserKind(str, Enum):
    DIVERSE = "DIVERSE"
    CONSERVATIVE = "CONSERVATIVE"
    EXTERNAL = "EXTERNAL"


@dataclass
class DiverseConfig:
    p_sub: float = 0.3
    p_del: float = 0.05
    reorder: bool = True
    lexicon: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not (0 <= self.p_sub <= 1 and 0 <= self.p_del <= 1):
            raise ValueError("p_sub and p_del must be in [0, 1]")
        if self.p_sub + self.p_del > 1:
            raise ValueError("p_sub + p_del must not exceed 1")


@dataclass
class ConservativeConfig:
    """Ordered rewrite rules; replacements must never match a pattern again."""

    rewrite_table: list[tuple[list[str], list[str]]] = field(default_factory=list)


@dataclass
class ParaphraserSpec:
    name: str
    kind: ParaphraserKind
    config: DiverseConfig | ConservativeConfig | Callable[[str, int, int], str]


@dataclass
class ParaphraseLineage:
    base: Document
    rounds: list[Document]
    paraphraser: str

    def at_round(self, i: int) -> Document:
        """Round 0 is the base document itself."""
        if i == 0:
            return self.base
        return self.rounds[i - 1]


def rewrite_diverse(text: str, config: DiverseConfig, seed: int) -> str:
    """One diverse rewrite pass.

    Per token, a single uniform draw decides delete / substitute / keep,
    which keeps the two probabilities exclusive.  Substitution only fires
    for tokens with lexicon entries; the draw is spent either way so the
    expected substitution rate over in-lexicon tokens is exactly p_sub.
    Reordering swaps the spans around the first comma that survives.
    """
    rng = SplitMix64(seed)
    out: list[str] = []
    for tok in tokenize(text):
        u = rng.uniform()
        if u < config.p_del:
            continue
        if u < config.p_del + config.p_sub and tok in config.lexicon:
            tok = config.lexicon[tok][rng.below(len(config.lexicon[tok]))]
        out.append(tok)
    if config.reorder and "," in out:
        cut = out.index(",")
        out = out[cut + 1 :] + [","] + out[:cut]
    return detokenize(out)


def rewrite_conservative(text: str, config: ConservativeConfig) -> str:
    """Single leftmost-longest pass over the rewrite table. No randomness."""
    toks = tokenize(text)
    out: list[str] = []
    i = 0
    while i < len(toks):
        best: tuple[list[str], list[str]] | None = None
        for pattern, replacement in config.rewrite_table:
            if toks[i : i + len(pattern)] == pattern:
                if best is None or len(pattern) > len(best[0]):
                    best = (pattern, replacement)
        if best is not None:
            out.extend(best[1])
            i += len(best[0])
        else:
            out.append(toks[i])
            i += 1
    return detokenize(out)


def _rewrite(spec: ParaphraserSpec, text: str, round_index: int, seed: int) -> str:
    if spec.kind is ParaphraserKind.DIVERSE:
        return rewrite_diverse(text, spec.config, seed)
    if spec.kind is ParaphraserKind.CONSERVATIVE:
        return rewrite_conservative(text, spec.config)
    try:
        return spec.config(text, round_index, seed)
    except BridgeError as exc:
        raise BridgeError(f"external paraphraser failed at round {round_index}: {exc}") from exc


def recursive_paraphrase(doc: Document, spec: ParaphraserSpec, rounds: int, seed: int) -> ParaphraseLineage:
    """Chain ``rounds`` rewrites, each consuming the previous round's text."""
    if not (0 <= rounds <= MAX_ROUNDS):
        raise ValueError(f"rounds must be in 0..{MAX_ROUNDS}")
    out: list[Document] = []
    text = doc.text
    for i in range(1, rounds + 1):
        text = _rewrite(spec, text, i, hash_pair(seed, i))
        out.append(
            Document.make(
                id=f"{doc.id}:pp{i}:{spec.name}",
                source=doc.source,
                origin=doc.origin,
                kind=Kind.PP,
                round=i,
                text=text,
            )
        )
    return ParaphraseLineage(base=doc, rounds=out, paraphraser=spec.name)


def condense(text: str, max_tokens: int) -> str:
    """Extractive condenser: longest whole-sentence prefix under the cap.

    Falls back to the first max_tokens tokens when even the first sentence
    is over the cap.
    """
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    if len(tokenize(text)) <= max_tokens:
        return text
    kept: list[str] = []
    used = 0
    for sent in sentences(text):
        n = len(tokenize(sent))
        if used + n > max_tokens:
            break
        kept.append(sent)
        used += n
    if not kept:
        return detokenize(tokenize(text)[:max_tokens])
    return " ".join(kept)


def load_lexicon(path) -> dict[str, list[str]]:
    """Read a lexicon file: JSONL rows of {"token": ..., "synonyms": [...]}."""
    import json

    lex: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            lex[obj["token"]] = list(obj["synonyms"])
    return lex


def save_lexicon(path, lexicon: dict[str, list[str]]) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for token in sorted(lexicon):
            fh.write(json.dumps({"token": token, "synonyms": lexicon[token]}) + "\n")
