"""Whitespace tokenizer and vocabulary shared by every module.

The tokenizer splits on whitespace and peels terminal punctuation
(``. , ! ? ; :``) off the end of each chunk, one token per character.
``detokenize`` re-attaches punctuation-only tokens to the preceding word,
so the pair defines a canonical text form: single spaces, punctuation
glued to the word it follows.  ``detokenize(tokenize(t))`` returns ``t``
whenever ``t`` is already canonical, and tokenize/detokenize are mutually
inverse on token lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownTokenError

TERMINAL_PUNCT = ".,!?;:"

EOT = "<|eot|>"


def tokenize(text: str) -> list[str]:
    """Split text into word and punctuation tokens."""
    tokens: list[str] = []
    for chunk in text.split():
        trailing: list[str] = []
        while len(chunk) > 1 and chunk[-1] in TERMINAL_PUNCT:
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.append(chunk)
        tokens.extend(reversed(trailing))
    return tokens


def detokenize(tokens: list[str]) -> str:
    """Join tokens with spaces, attaching punctuation tokens to their word."""
    parts: list[str] = []
    for tok in tokens:
        if parts and tok and all(c in TERMINAL_PUNCT for c in tok):
            parts[-1] += tok
        else:
            parts.append(tok)
    return " ".join(parts)


def count_tokens(text: str) -> int:
    return len(tokenize(text))


def sentences(text: str) -> list[str]:
    """Split text into sentences on ``. ! ?`` followed by whitespace.

    Crude on purpose: deterministic and documented beats clever here.
    """
    out: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in ".!?" and (i + 1 == n or text[i + 1].isspace()):
            out.append(text[start : i + 1].strip())
            start = i + 1
        i += 1
    tail = text[start:].strip()
    if tail:
        out.append(tail)
    return [s for s in out if s]


@dataclass
class Vocabulary:
    """Bijection between token surfaces and dense indices.

    Index 0 is always the reserved end-of-text token.  Construction from a
    corpus sorts surfaces, so the mapping is a pure function of the token
    set.
    """

    tokens: list[str]
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {surface: i for i, surface in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("vocabulary surfaces must be unique")
        if self.tokens[0] != EOT:
            raise ValueError("vocabulary must reserve index 0 for end-of-text")

    @classmethod
    def from_token_lists(cls, streams: list[list[str]]) -> "Vocabulary":
        surfaces = sorted({tok for stream in streams for tok in stream} - {EOT})
        return cls([EOT] + surfaces)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def eot_index(self) -> int:
        return 0

    def encode(self, surfaces: list[str]) -> list[int]:
        try:
            return [self.index[s] for s in surfaces]
        except KeyError as exc:
            raise UnknownTokenError(f"token {exc.args[0]!r} not in vocabulary") from None

    def decode(self, indices: list[int]) -> list[str]:
        return [self.tokens[i] for i in indices]

    def to_list(self) -> list[str]:
        return list(self.tokens)
